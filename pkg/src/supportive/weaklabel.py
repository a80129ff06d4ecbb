"""Weak-label dataset construction and scorer discriminability statistics.

The informed builder takes the top-ranked tweets of each scorer over the
supportive side as positives and samples negatives from the low-score tail
of the not-supportive side; the hashtag baseline samples uniformly from the
partition sides. Both are deterministic functions of (inputs, seed).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from .corpus import NOT_SUPPORTIVE, SUPPORTIVE, CorpusPartition
from .errors import DataError
from .provenance import read_jsonl, write_jsonl
from .scorers import ScoreTable, rank

HOPE = "hope"
EMPATHY = "empathy"

PAIR_CHUNK = 10_000


@dataclass(frozen=True)
class WeakExample:
    id: str
    text: str
    label: Optional[str]  # supportive | not-supportive | None (gold pending)
    provenance: str  # informed+ | informed- | hashtag+ | hashtag- | gold


@dataclass
class WeakDataset:
    examples: list[WeakExample]
    seed: int
    config: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.examples)

    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]

    def positives(self) -> list[WeakExample]:
        return [ex for ex in self.examples if ex.label == SUPPORTIVE]

    def negatives(self) -> list[WeakExample]:
        return [ex for ex in self.examples if ex.label == NOT_SUPPORTIVE]

    def validate(self):
        pos, neg = self.positives(), self.negatives()
        for name, side in (("positives", pos), ("negatives", neg)):
            texts = [ex.text for ex in side]
            if len(set(texts)) != len(texts):
                raise DataError(f"duplicate text among {name}")
        pos_ids, neg_ids = {ex.id for ex in pos}, {ex.id for ex in neg}
        if pos_ids & neg_ids:
            raise DataError("positives and negatives share tweet ids")
        if {ex.text for ex in pos} & {ex.text for ex in neg}:
            raise DataError("positives and negatives share texts")
        return self

    def save(self, path, extra_meta: dict | None = None):
        meta = {"kind": "weak_dataset", "seed": self.seed, "config": self.config}
        if extra_meta:
            meta.update(extra_meta)
        write_jsonl(
            path,
            meta,
            (
                {
                    "id": ex.id,
                    "text": ex.text,
                    "label": ex.label,
                    "provenance": ex.provenance,
                }
                for ex in self.examples
            ),
        )

    @classmethod
    def load(cls, path) -> "WeakDataset":
        meta, rows = read_jsonl(path)
        examples = [
            WeakExample(
                id=r["id"],
                text=r["text"],
                label=r.get("label"),
                provenance=r.get("provenance", "gold"),
            )
            for r in rows
        ]
        return cls(
            examples=examples,
            seed=int(meta.get("seed", 0)),
            config=dict(meta.get("config", {})),
        )


@dataclass(frozen=True)
class PairRate:
    rate: float
    wins: int
    n_pairs: int
    seed: int
    scorer: str


@dataclass(frozen=True)
class RateSummary:
    scorer: str
    mean: float
    std: float
    rates: tuple[float, ...]
    n_pairs: int
    seeds: tuple[int, ...]


def _require_coverage(table: ScoreTable, part: CorpusPartition):
    wanted = part.supportive | part.not_supportive
    missing = wanted - table.ids()
    if missing:
        raise DataError(
            f"score table does not cover the partition: missing "
            f"{sorted(missing)[0]!r} (and {len(missing) - 1} more)"
        )


def _dedup_by_text(
    ordered_ids: Iterable[str],
    texts: Mapping[str, str],
    taken_texts: set[str],
) -> list[str]:
    out, seen_ids = [], set()
    for tid in ordered_ids:
        if tid in seen_ids:
            continue
        seen_ids.add(tid)
        text = texts[tid]
        if text in taken_texts:
            continue
        taken_texts.add(text)
        out.append(tid)
    return out


def build_informed(
    table: ScoreTable,
    part: CorpusPartition,
    texts: Mapping[str, str],
    top_k: int = 1000,
    neg_per_list: int = 500,
    bottom_frac: float = 0.8,
    seed: int = 0,
    exclude_ids: Iterable[str] = (),
    scorers: tuple[str, str] = (HOPE, EMPATHY),
) -> WeakDataset:
    """Informed-sampling dataset construction.

    Positives: the union of the top `top_k` tweets of each scorer's ranked
    list over the supportive side, deduplicated on exact cleaned text (the
    hope list is walked first, so it supplies the representative of a
    duplicated text). Negatives: `neg_per_list` draws per scorer from the
    low-score tail, restricted to tweets ranked beyond the top
    (1 - bottom_frac) cut of *both* lists so every negative sits in the
    bottom tail regardless of which scorer sampled it. Cross-set text or id
    collisions are dropped from the negatives.
    """
    if not 0.0 < bottom_frac < 1.0:
        raise DataError(f"bottom_frac must be in (0,1), got {bottom_frac}")
    for s in scorers:
        if s not in table.scorers:
            raise DataError(f"scorer {s!r} missing from score table")
    _require_coverage(table, part)
    excluded = set(exclude_ids)
    sup_ids = sorted(part.supportive - excluded)
    not_ids = sorted(part.not_supportive - excluded)
    if len(sup_ids) < top_k:
        raise DataError(
            f"supportive side has {len(sup_ids)} tweets, need top_k={top_k}"
        )

    sup_ranked = {s: rank(table, s, sup_ids) for s in scorers}
    pos_order = []
    for s in scorers:
        pos_order.extend(sup_ranked[s][:top_k])
    taken = set()
    pos_ids = _dedup_by_text(pos_order, texts, taken)

    n_not = len(not_ids)
    cut = math.ceil((1.0 - bottom_frac) * n_not)
    not_ranked = {s: rank(table, s, not_ids) for s in scorers}
    rank_pos = {
        s: {tid: i + 1 for i, tid in enumerate(not_ranked[s])} for s in scorers
    }
    pool = sorted(
        tid for tid in not_ids if all(rank_pos[s][tid] > cut for s in scorers)
    )
    if len(pool) < neg_per_list:
        raise DataError(
            f"bottom-tail pool has {len(pool)} tweets, need "
            f"neg_per_list={neg_per_list} (not-supportive side {n_not}, cut {cut})"
        )
    rng = np.random.default_rng(seed)
    neg_order = []
    for _ in scorers:
        draw = rng.choice(len(pool), size=neg_per_list, replace=False)
        neg_order.extend(pool[i] for i in sorted(draw))
    pos_id_set = set(pos_ids)
    taken_neg = {texts[t] for t in pos_ids}
    neg_ids = [
        t for t in _dedup_by_text(neg_order, texts, taken_neg) if t not in pos_id_set
    ]

    examples = [
        WeakExample(id=t, text=texts[t], label=SUPPORTIVE, provenance="informed+")
        for t in pos_ids
    ] + [
        WeakExample(id=t, text=texts[t], label=NOT_SUPPORTIVE, provenance="informed-")
        for t in neg_ids
    ]
    config = {
        "builder": "informed",
        "top_k": top_k,
        "neg_per_list": neg_per_list,
        "bottom_frac": bottom_frac,
        "scorers": list(scorers),
        "excluded": len(excluded),
    }
    return WeakDataset(examples=examples, seed=seed, config=config).validate()


def _sample_distinct_texts(
    ids: list[str],
    texts: Mapping[str, str],
    n: int,
    rng: np.random.Generator,
    taken_texts: set[str],
    side: str,
) -> list[str]:
    order = rng.permutation(len(ids))
    out = []
    for i in order:
        tid = ids[i]
        text = texts[tid]
        if text in taken_texts:
            continue
        taken_texts.add(text)
        out.append(tid)
        if len(out) == n:
            return out
    raise DataError(
        f"{side} side exhausted after {len(out)} distinct texts, need {n}"
    )


def build_hashtag_baseline(
    part: CorpusPartition,
    texts: Mapping[str, str],
    n_pos: int,
    n_neg: int,
    seed: int = 0,
    exclude_ids: Iterable[str] = (),
) -> WeakDataset:
    """Hashtag-only weak labels: uniform draws from each partition side,
    sized to mirror the paired informed dataset."""
    if n_pos <= 0 or n_neg <= 0:
        raise DataError(f"need positive sample sizes, got n_pos={n_pos} n_neg={n_neg}")
    excluded = set(exclude_ids)
    sup_ids = sorted(part.supportive - excluded)
    not_ids = sorted(part.not_supportive - excluded)
    if len(sup_ids) < n_pos:
        raise DataError(f"supportive side has {len(sup_ids)} tweets, need {n_pos}")
    if len(not_ids) < n_neg:
        raise DataError(f"not-supportive side has {len(not_ids)} tweets, need {n_neg}")
    rng = np.random.default_rng(seed)
    taken: set[str] = set()
    pos_ids = _sample_distinct_texts(sup_ids, texts, n_pos, rng, taken, "supportive")
    neg_ids = _sample_distinct_texts(not_ids, texts, n_neg, rng, taken, "not-supportive")
    examples = [
        WeakExample(id=t, text=texts[t], label=SUPPORTIVE, provenance="hashtag+")
        for t in pos_ids
    ] + [
        WeakExample(id=t, text=texts[t], label=NOT_SUPPORTIVE, provenance="hashtag-")
        for t in neg_ids
    ]
    config = {"builder": "hashtag", "n_pos": n_pos, "n_neg": n_neg, "excluded": len(excluded)}
    return WeakDataset(examples=examples, seed=seed, config=config).validate()


def build_eval_sample(
    part: CorpusPartition,
    texts: Mapping[str, str],
    n: int = 1000,
    seed: int = 0,
) -> WeakDataset:
    """Unlabeled evaluation sample drawn uniformly without replacement from
    both partition sides; label fields stay blank until annotation."""
    union = sorted(part.supportive | part.not_supportive)
    if len(union) < n:
        raise DataError(f"partition union has {len(union)} tweets, need {n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(union))[:n]
    examples = [
        WeakExample(id=union[i], text=texts[union[i]], label=None, provenance="gold")
        for i in order
    ]
    config = {"builder": "eval", "n": n}
    return WeakDataset(examples=examples, seed=seed, config=config)


def _chunk_wins(sup_scores, not_scores, n_pairs, seed_seq) -> int:
    rng = np.random.default_rng(seed_seq)
    ix = rng.integers(0, len(sup_scores), size=n_pairs)
    iy = rng.integers(0, len(not_scores), size=n_pairs)
    return int(np.count_nonzero(sup_scores[ix] > not_scores[iy]))


def pairwise_rate(
    table: ScoreTable,
    part: CorpusPartition,
    scorer: str,
    n_pairs: int = 100_000,
    seed: int = 0,
    jobs: int = 1,
) -> PairRate:
    """Monte-Carlo discriminability: the fraction of random cross-side pairs
    where the supportive tweet strictly outscores the not-supportive one.

    Pairs are drawn with replacement. Sampling is split into fixed-size
    chunks with spawned seeds, so the result is identical for any worker
    count.
    """
    if scorer not in table.scorers:
        raise DataError(f"scorer {scorer!r} missing from score table")
    if n_pairs < 1:
        raise DataError("n_pairs must be >= 1")
    _require_coverage(table, part)
    sup_ids = sorted(part.supportive)
    not_ids = sorted(part.not_supportive)
    if not sup_ids or not not_ids:
        raise DataError("both partition sides must be nonempty")
    sup_scores = np.array([table.scores[t][scorer] for t in sup_ids])
    not_scores = np.array([table.scores[t][scorer] for t in not_ids])

    sizes = [PAIR_CHUNK] * (n_pairs // PAIR_CHUNK)
    if n_pairs % PAIR_CHUNK:
        sizes.append(n_pairs % PAIR_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            wins = sum(
                pool.map(
                    lambda args: _chunk_wins(sup_scores, not_scores, *args),
                    zip(sizes, seqs),
                )
            )
    else:
        wins = sum(
            _chunk_wins(sup_scores, not_scores, size, seq)
            for size, seq in zip(sizes, seqs)
        )
    return PairRate(
        rate=wins / n_pairs, wins=wins, n_pairs=n_pairs, seed=seed, scorer=scorer
    )


def repeated_rate(
    table: ScoreTable,
    part: CorpusPartition,
    scorer: str,
    n_pairs: int = 100_000,
    runs: int = 5,
    base_seed: int = 0,
    jobs: int = 1,
) -> RateSummary:
    """Mean and (population) standard deviation of the pairwise rate across
    independent runs seeded base_seed .. base_seed + runs - 1."""
    if runs < 1:
        raise DataError("runs must be >= 1")
    seeds = tuple(base_seed + i for i in range(runs))
    rates = tuple(
        pairwise_rate(table, part, scorer, n_pairs=n_pairs, seed=s, jobs=jobs).rate
        for s in seeds
    )
    arr = np.array(rates)
    return RateSummary(
        scorer=scorer,
        mean=float(arr.mean()),
        std=float(arr.std()),
        rates=rates,
        n_pairs=n_pairs,
        seeds=seeds,
    )
