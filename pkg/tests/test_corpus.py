import json
from datetime import datetime, timezone

import numpy as np
import pytest

from supportive.corpus import (
    Corpus,
    HashtagGroup,
    TweetRecord,
    group_id_sets,
    infer_country,
    jaccard,
    load_corpus,
    load_hashtag_groups,
    partition,
)
from supportive.errors import ConfigError, DataError


def record(tid="t1", hashtags=(), geo=None, flags=(), text="hello world"):
    return TweetRecord(
        id=tid,
        raw_text=text,
        hashtags=tuple(hashtags),
        mentions=(),
        urls=(),
        like_count=0,
        retweet_count=0,
        geo_country=geo,
        profile_flags=tuple(flags),
        timestamp=datetime(2021, 4, 21, tzinfo=timezone.utc),
    )


def corpus_of(records):
    return Corpus(records={r.id: r for r in records})


def line(tid, **kw):
    obj = {
        "id": tid,
        "text": "some tweet text",
        "hashtags": [],
        "like_count": 1,
        "retweet_count": 2,
        "timestamp": "2021-04-22T10:00:00Z",
    }
    obj.update(kw)
    return json.dumps(obj)


class TestLoadCorpus:
    def test_counts_valid_lines(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text("\n".join(line(f"t{i}") for i in range(3)) + "\n")
        corpus = load_corpus(p)
        assert len(corpus) == 3 and corpus.skipped == 0

    def test_skips_malformed(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text(line("t1") + "\n" + "{broken\n" + line("t2") + "\n")
        corpus = load_corpus(p)
        assert len(corpus) == 2 and corpus.skipped == 1

    def test_malformed_variants(self, tmp_path):
        p = tmp_path / "c.jsonl"
        bad = [
            json.dumps({"text": "no id"}),
            line("t1", like_count=-3),
            line("t2", timestamp=None),
            line("t3"),
            line("t3"),  # duplicate id
        ]
        p.write_text("\n".join(bad) + "\n")
        corpus = load_corpus(p)
        assert len(corpus) == 1 and corpus.skipped == 4

    def test_empty_corpus_is_error(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text("{bad\n")
        with pytest.raises(DataError):
            load_corpus(p)

    def test_unreadable_path(self, tmp_path):
        with pytest.raises(OSError):
            load_corpus(tmp_path / "missing.jsonl")

    def test_hashtags_stored_without_sigil(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text(line("t1", hashtags=["#IndiaNeedsOxygen", "Other"]) + "\n")
        corpus = load_corpus(p)
        assert corpus.records["t1"].hashtags == ("IndiaNeedsOxygen", "Other")

    def test_schema_mapping(self, tmp_path):
        p = tmp_path / "c.jsonl"
        obj = {
            "tweet_id": "x",
            "body": "text here",
            "like_count": 0,
            "retweet_count": 0,
            "timestamp": "2021-04-22T10:00:00+00:00",
        }
        p.write_text(json.dumps(obj) + "\n")
        corpus = load_corpus(p, schema={"id": "tweet_id", "text": "body"})
        assert corpus.records["x"].raw_text == "text here"

    def test_profile_flags_accept_codes_emoji_or_display_name(self, tmp_path):
        p = tmp_path / "c.jsonl"
        flag_in, flag_pk = "\U0001f1ee\U0001f1f3", "\U0001f1f5\U0001f1f0"
        p.write_text(
            line("t1", profile_flags=["pk"]) + "\n"
            + line("t2", profile_flags=[flag_in, flag_pk]) + "\n"
            + line("t3", profile_flags=f"ali {flag_pk} khan") + "\n"
        )
        corpus = load_corpus(p)
        assert corpus.records["t1"].profile_flags == ("PK",)
        assert corpus.records["t2"].profile_flags == ("IN", "PK")
        assert corpus.records["t3"].profile_flags == ("PK",)

    def test_fingerprint_order_independent(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        a.write_text(line("t1") + "\n" + line("t2") + "\n")
        b.write_text(line("t2") + "\n" + line("t1") + "\n")
        assert load_corpus(a).fingerprint() == load_corpus(b).fingerprint()


class TestInferCountry:
    def test_geo_only(self):
        lab = infer_country(record(geo="IN"))
        assert (lab.value, lab.source, lab.consistent) == ("India", "geo", True)

    def test_emoji_only(self):
        lab = infer_country(record(flags=["PK"]))
        assert (lab.value, lab.source) == ("Pakistan", "emoji")

    def test_geo_beats_disagreeing_flag(self):
        lab = infer_country(record(geo="IN", flags=["PK"]))
        assert (lab.value, lab.source, lab.consistent) == ("India", "both", False)

    def test_agreeing_evidence_is_consistent(self):
        lab = infer_country(record(geo="PK", flags=["PK"]))
        assert (lab.value, lab.source, lab.consistent) == ("Pakistan", "both", True)

    def test_both_flags_no_geo_is_unknown(self):
        lab = infer_country(record(flags=["IN", "PK"]))
        assert (lab.value, lab.source, lab.consistent) == ("Unknown", "emoji", True)

    def test_no_evidence(self):
        lab = infer_country(record())
        assert (lab.value, lab.source) == ("Unknown", None)

    def test_other_geo(self):
        assert infer_country(record(geo="US")).value == "Other"

    def test_consistency_invariant(self):
        # consistent=False only with source=both and disagreement
        cases = [
            record(geo="IN"), record(flags=["IN"]), record(),
            record(geo="IN", flags=["IN"]), record(geo="IN", flags=["PK"]),
            record(flags=["IN", "PK"]),
        ]
        for rec in cases:
            lab = infer_country(rec)
            if not lab.consistent:
                assert lab.source == "both"


GROUPS = [
    HashtagGroup(
        "oxygen", frozenset({"indianeedsoxygen", "indianeedoxygen"}), "supportive"
    ),
    HashtagGroup(
        "sorry", frozenset({"endiasaysorrytokashmir"}), "not-supportive"
    ),
]


class TestPartition:
    def test_polarity_routing(self):
        corpus = corpus_of(
            [
                record("a", hashtags=["IndiaNeedsOxygen"]),
                record("b", hashtags=["IndiaNeedsOxygen", "EndiaSaySorryToKashmir"]),
                record("c", hashtags=["COVID19"]),
                record("d", hashtags=["endiaSAYSORRYtokashmir"]),
            ]
        )
        part = partition(corpus, GROUPS)
        assert part.supportive == {"a"}
        assert part.discarded == {"b"}
        assert part.unmatched == {"c"}
        assert part.not_supportive == {"d"}

    def test_disjoint_and_exhaustive(self):
        rng = np.random.default_rng(3)
        tags = ["IndiaNeedsOxygen", "EndiaSaySorryToKashmir", "Other1", "Other2"]
        records = [
            record(f"t{i}", hashtags=list(rng.choice(tags, size=rng.integers(0, 3))))
            for i in range(200)
        ]
        corpus = corpus_of(records)
        part = partition(corpus, GROUPS)
        sets = [part.supportive, part.not_supportive, part.discarded, part.unmatched]
        assert sum(len(s) for s in sets) == len(corpus)
        union = set().union(*sets)
        assert union == set(corpus.records)

    def test_overlapping_variants_rejected(self):
        bad = GROUPS + [HashtagGroup("dup", frozenset({"indianeedsoxygen"}), "supportive")]
        with pytest.raises(ConfigError):
            partition(corpus_of([record("a")]), bad)

    def test_empty_groups_rejected(self):
        with pytest.raises(ConfigError):
            partition(corpus_of([record("a")]), [])


class TestJaccard:
    def test_identity(self):
        assert jaccard({"a", "b"}, {"a", "b"}) == 1.0

    def test_hand_case(self):
        assert jaccard({"1", "2"}, {"2", "3"}) == 1 / 3

    def test_empty_error(self):
        with pytest.raises(DataError):
            jaccard(set(), set())

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(11)
        universe = [f"x{i}" for i in range(40)]
        for _ in range(100):
            a = {u for u in universe if rng.random() < 0.4}
            b = {u for u in universe if rng.random() < 0.4}
            if not (a | b):
                continue
            inter = sum(1 for x in a if x in b)
            union = len(set(list(a) + list(b)))
            assert jaccard(a, b) == inter / union
            assert jaccard(a, b) == jaccard(b, a)
            if not (a & b):
                assert jaccard(a, b) == 0.0


def test_group_config_roundtrip(tmp_path):
    p = tmp_path / "groups.txt"
    p.write_text(
        "# comment\n"
        "oxygen supportive IndiaNeedsOxygen IndiaNeedOxygen\n"
        "sorry not-supportive #EndiaSaySorryToKashmir\n"
    )
    groups = load_hashtag_groups(p)
    assert [g.group_id for g in groups] == ["oxygen", "sorry"]
    assert groups[0].variants == frozenset({"indianeedsoxygen", "indianeedoxygen"})
    assert groups[1].polarity == "not-supportive"
    assert groups[1].variants == frozenset({"endiasaysorrytokashmir"})


def test_group_config_errors(tmp_path):
    p = tmp_path / "groups.txt"
    p.write_text("oxygen supportive\n")
    with pytest.raises(ConfigError):
        load_hashtag_groups(p)
    p.write_text("g1 sideways TagA\n")
    with pytest.raises(ConfigError):
        load_hashtag_groups(p)
    p.write_text("")
    with pytest.raises(ConfigError):
        load_hashtag_groups(p)


def test_group_id_sets_overlap_allowed():
    corpus = corpus_of(
        [
            record("a", hashtags=["IndiaNeedsOxygen", "EndiaSaySorryToKashmir"]),
            record("b", hashtags=["IndiaNeedOxygen"]),
        ]
    )
    sets = group_id_sets(corpus, GROUPS)
    assert sets["oxygen"] == {"a", "b"}
    assert sets["sorry"] == {"a"}
