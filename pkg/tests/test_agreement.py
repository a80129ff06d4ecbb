import itertools

import numpy as np
import pytest

from supportive.agreement import (
    AnnotationMatrix,
    fleiss_kappa,
    majority_gold,
    merge_adjudication,
    read_sheet,
    round_from_filename,
    write_sheet,
)
from supportive.errors import DataError


def matrix_from_rows(rows, round=1):
    """rows: list of per-item label lists."""
    k = max(len(r) for r in rows)
    annotators = tuple(f"annotator_{i + 1}" for i in range(k))
    labels = {
        f"i{n:03d}": {annotators[j]: lab for j, lab in enumerate(r)}
        for n, r in enumerate(rows)
    }
    return AnnotationMatrix(labels=labels, annotators=annotators, round=round)


def kappa_oracle(rows):
    """Independent route: per-item agreement by enumerating ordered rater
    pairs, expected agreement from the raw label stream."""
    per_item = []
    stream = []
    for labels in rows:
        n = len(labels)
        pairs = list(itertools.permutations(range(n), 2))
        per_item.append(
            sum(labels[a] == labels[b] for a, b in pairs) / len(pairs)
        )
        stream.extend(labels)
    p_bar = sum(per_item) / len(per_item)
    p_exp = sum(
        (stream.count(c) / len(stream)) ** 2 for c in set(stream)
    )
    if p_exp == 1.0:
        return 1.0
    return (p_bar - p_exp) / (1.0 - p_exp)


class TestFleissKappa:
    def test_perfect_agreement(self):
        m = matrix_from_rows([["pos"] * 3, ["neg"] * 3, ["pos"] * 3])
        assert fleiss_kappa(m) == 1.0

    def test_hand_case_one_third(self):
        rows = [
            ["pos", "pos", "pos"],
            ["pos", "pos", "neg"],
            ["pos", "neg", "neg"],
            ["neg", "neg", "neg"],
        ]
        assert abs(fleiss_kappa(matrix_from_rows(rows)) - 1 / 3) <= 1e-9

    def test_single_category_degenerate(self):
        m = matrix_from_rows([["pos"] * 3, ["pos"] * 3])
        assert fleiss_kappa(m) == 1.0

    def test_item_with_one_label_rejected(self):
        m = matrix_from_rows([["pos", "neg"]])
        m.labels["i000"] = {"annotator_1": "pos"}
        with pytest.raises(DataError):
            fleiss_kappa(m)

    def test_matches_pair_enumeration_oracle(self):
        rng = np.random.default_rng(31)
        cats = ["a", "b", "c"]
        for trial in range(25):
            n_cats = 2 + trial % 2
            rows = [
                [cats[rng.integers(n_cats)] for _ in range(3)] for _ in range(50)
            ]
            got = fleiss_kappa(matrix_from_rows(rows))
            assert abs(got - kappa_oracle(rows)) <= 1e-12
            assert -1.0 <= got <= 1.0 + 1e-12

    def test_unequal_rater_counts(self):
        rows = [["a", "a", "b"], ["a", "b"], ["b", "b", "b", "a"]]
        got = fleiss_kappa(matrix_from_rows(rows))
        assert abs(got - kappa_oracle(rows)) <= 1e-12

    def test_invariance_under_relabeling_and_order(self):
        rng = np.random.default_rng(8)
        rows = [[("x" if rng.random() < 0.6 else "y") for _ in range(3)] for _ in range(40)]
        base = fleiss_kappa(matrix_from_rows(rows))
        swapped = [["y" if l == "x" else "x" for l in r] for r in rows]
        assert fleiss_kappa(matrix_from_rows(swapped)) == pytest.approx(base, abs=1e-12)
        assert fleiss_kappa(matrix_from_rows(rows[::-1])) == pytest.approx(base, abs=1e-12)

    def test_kappa_one_iff_all_unanimous(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            rows = [
                [("p" if rng.random() < 0.5 else "q")] * 3
                if rng.random() < 0.7
                else [("p" if rng.random() < 0.5 else "q") for _ in range(3)]
                for _ in range(20)
            ]
            unanimous = all(len(set(r)) == 1 for r in rows)
            k = fleiss_kappa(matrix_from_rows(rows))
            assert (k == 1.0) == unanimous


class TestMajorityGold:
    def test_unanimous(self):
        gold = majority_gold(matrix_from_rows([["pos", "pos", "pos"]]))
        assert gold.labels["i000"] == "pos"
        assert gold.resolution["i000"] == "unanimous"

    def test_majority(self):
        gold = majority_gold(matrix_from_rows([["pos", "pos", "neg"]]))
        assert gold.labels["i000"] == "pos"
        assert gold.resolution["i000"] == "majority"

    def test_tie_unresolved(self):
        gold = majority_gold(matrix_from_rows([["pos", "neg"]]))
        assert gold.labels["i000"] is None
        assert gold.resolution["i000"] == "unresolved"
        assert gold.unresolved_items() == ["i000"]

    def test_matches_vote_count_oracle(self):
        rng = np.random.default_rng(77)
        cats = ["a", "b", "c"]
        for _ in range(30):
            rows = [
                [cats[rng.integers(3)] for _ in range(int(rng.integers(2, 6)))]
                for _ in range(25)
            ]
            gold = majority_gold(matrix_from_rows(rows))
            for n, r in enumerate(rows):
                item = f"i{n:03d}"
                counts = {c: r.count(c) for c in set(r)}
                best = max(counts.values())
                winners = [c for c, v in counts.items() if v == best]
                if len(winners) == 1:
                    assert gold.labels[item] == winners[0]
                else:
                    assert gold.labels[item] is None


class TestMergeAdjudication:
    def base(self):
        return matrix_from_rows(
            [["pos", "pos", "neg"], ["pos", "neg", "neg"], ["pos", "pos", "pos"]]
        )

    def revision(self, items):
        annotators = ("annotator_1", "annotator_2", "annotator_3")
        return AnnotationMatrix(
            labels=items, annotators=annotators, round=2
        )

    def test_empty_like_revision_identity(self):
        base = self.base()
        merged = merge_adjudication(
            base, self.revision({"i000": {"annotator_1": "pos"}})
        )
        assert merged.labels["i000"]["annotator_1"] == "pos"
        assert merged.labels["i001"] == base.labels["i001"]
        assert merged.round == 2

    def test_full_consensus_revision_reaches_kappa_one(self):
        base = self.base()
        rev = self.revision(
            {
                "i000": {a: "pos" for a in base.annotators},
                "i001": {a: "neg" for a in base.annotators},
            }
        )
        merged = merge_adjudication(base, rev)
        assert fleiss_kappa(merged) == 1.0

    def test_partial_revision_recomputes_kappa(self):
        base = self.base()
        rev = self.revision({"i001": {"annotator_2": "pos"}})
        merged = merge_adjudication(base, rev)
        rows = [
            ["pos", "pos", "neg"],
            ["pos", "pos", "neg"],
            ["pos", "pos", "pos"],
        ]
        assert fleiss_kappa(merged) == pytest.approx(kappa_oracle(rows), abs=1e-12)

    def test_merge_idempotent(self):
        base = self.base()
        rev = self.revision({"i000": {"annotator_3": "pos"}})
        once = merge_adjudication(base, rev)
        rev2 = self.revision({"i000": {"annotator_3": "pos"}})
        rev2.round = once.round + 1
        twice = merge_adjudication(once, rev2)
        assert twice.labels == once.labels

    def test_unknown_item_rejected(self):
        with pytest.raises(DataError):
            merge_adjudication(self.base(), self.revision({"zzz": {"annotator_1": "pos"}}))

    def test_wrong_round_rejected(self):
        rev = self.revision({"i000": {"annotator_1": "pos"}})
        rev.round = 5
        with pytest.raises(DataError):
            merge_adjudication(self.base(), rev)


class TestSheets:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "eval.sheet.round2.tsv"
        rows = [
            ("a", "some text", {"annotator_1": "pos", "annotator_2": "neg"}),
            ("b", "tab\there", {"annotator_1": "pos"}),
        ]
        write_sheet(p, rows, ("annotator_1", "annotator_2"))
        m = read_sheet(p)
        assert m.round == 2
        assert m.labels["a"] == {"annotator_1": "pos", "annotator_2": "neg"}
        assert m.labels["b"] == {"annotator_1": "pos"}
        assert m.texts["b"] == "tab here"

    def test_round_from_filename(self):
        assert round_from_filename("x/eval.sheet.round3.tsv") == 3
        assert round_from_filename("sheet.tsv") == 1

    def test_bad_header(self, tmp_path):
        p = tmp_path / "bad.tsv"
        p.write_text("id\ttext\tannotator_1\n")
        with pytest.raises(DataError):
            read_sheet(p)

    def test_matrix_invariants(self):
        with pytest.raises(DataError):
            AnnotationMatrix(labels={"a": {}}, annotators=("x",))
        with pytest.raises(DataError):
            AnnotationMatrix(labels={}, annotators=("x", "y"))
