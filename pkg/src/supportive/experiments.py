"""Training/evaluation runs and corpus analytics.

Evaluation reports aggregate repeated seeded runs (mean and population
standard deviation); engagement analytics use population standard deviation
as well; the choice is noted in every output header.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .cleaning import CleanText, clean
from .corpus import Corpus, CountryLabel, HashtagGroup, SUPPORTIVE
from .errors import DataError
from .linear import LinearClassifier
from .metrics import Metrics, compute_metrics
from .tfidf import TfidfVectorizer
from .weaklabel import WeakDataset


@dataclass
class EvalReport:
    model_name: str
    kind: str
    runs: list[Metrics]
    seeds: tuple[int, ...]
    mean: dict[str, float]
    std: dict[str, float]
    train_fingerprint: str
    eval_fingerprint: str
    config: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EngagementRow:
    group_key: str
    country: str
    count: int
    share: float
    like_mean: Optional[float]
    like_std: Optional[float]
    retweet_mean: Optional[float]
    retweet_std: Optional[float]


def dataset_fingerprint(ds: WeakDataset) -> str:
    h = hashlib.sha256()
    for ex in ds.examples:
        h.update(
            f"{ex.id}\x00{ex.text}\x00{ex.label}\x00{ex.provenance}\x01".encode("utf-8")
        )
    return h.hexdigest()


def _featurize(texts: Sequence[str]) -> list[CleanText]:
    # Dataset texts are already cleaned; clean() is idempotent so this is a
    # cheap way to recover token lists.
    return [clean(t) for t in texts]


def run_experiment(
    train: WeakDataset,
    eval_ds: WeakDataset,
    gold: Mapping[str, str],
    kind: str = "hinge",
    runs: int = 5,
    base_seed: int = 0,
    model_name: str = "model",
    min_df: int = 1,
    epochs: int = 20,
    learning_rate: float = 0.1,
    l2: float = 1e-4,
) -> EvalReport:
    """Train `runs` seeded models on `train` and evaluate each on the fixed
    gold-labeled eval set; seeds are base_seed .. base_seed + runs - 1."""
    if runs < 1:
        raise DataError("runs must be >= 1")
    unlabeled = sorted(ex.id for ex in eval_ds.examples if ex.id not in gold)
    if unlabeled:
        raise DataError(
            f"eval rows lack gold labels: {unlabeled[:5]}"
            + (f" (and {len(unlabeled) - 5} more)" if len(unlabeled) > 5 else "")
        )
    train_docs = _featurize([ex.text for ex in train.examples])
    y_train = [1 if ex.label == SUPPORTIVE else 0 for ex in train.examples]
    eval_docs = _featurize([ex.text for ex in eval_ds.examples])
    y_gold = [1 if gold[ex.id] == SUPPORTIVE else 0 for ex in eval_ds.examples]

    seeds = tuple(base_seed + i for i in range(runs))
    per_run: list[Metrics] = []
    for seed in seeds:
        vec = TfidfVectorizer(min_df=min_df).fit(train_docs)
        clf = LinearClassifier(
            kind=kind, seed=seed, epochs=epochs, learning_rate=learning_rate, l2=l2
        ).fit(vec.transform(train_docs), y_train)
        preds = clf.predict(vec.transform(eval_docs)).tolist()
        per_run.append(compute_metrics(preds, y_gold))

    def agg(attr):
        vals = np.array([getattr(m, attr) for m in per_run])
        return float(vals.mean()), float(vals.std())

    mean, std = {}, {}
    for attr in ("precision", "recall", "f1"):
        mean[attr], std[attr] = agg(attr)
    return EvalReport(
        model_name=model_name,
        kind=kind,
        runs=per_run,
        seeds=seeds,
        mean=mean,
        std=std,
        train_fingerprint=dataset_fingerprint(train),
        eval_fingerprint=dataset_fingerprint(eval_ds),
        config={
            "min_df": min_df,
            "epochs": epochs,
            "learning_rate": learning_rate,
            "l2": l2,
        },
    )


def engagement_stats(
    records: Iterable,
    label_of: Mapping[str, str],
    country_of: Mapping[str, str],
    expected_keys: Iterable[tuple[str, str]] | None = None,
) -> list[EngagementRow]:
    """Per (label x country) engagement summary.

    Shares are fractions of the call's whole input, so they sum to 1 across
    the emitted non-empty rows; standard deviations are population (ddof=0).
    Combinations listed in `expected_keys` but absent from the data are
    reported with count 0 and no statistics.
    """
    records = list(records)
    ids = {r.id for r in records}
    if ids != set(label_of) or ids != set(country_of):
        raise DataError("records, labels, and countries must cover the same id set")
    groups: dict[tuple[str, str], list] = {}
    for r in records:
        groups.setdefault((label_of[r.id], country_of[r.id]), []).append(r)
    total = len(records)
    keys = set(groups)
    if expected_keys is not None:
        keys |= set(expected_keys)
    rows = []
    for key in sorted(keys):
        # id-sorted so float accumulation is independent of input order
        members = sorted(groups.get(key, []), key=lambda r: r.id)
        if not members:
            rows.append(
                EngagementRow(
                    group_key=key[0], country=key[1], count=0, share=0.0,
                    like_mean=None, like_std=None, retweet_mean=None, retweet_std=None,
                )
            )
            continue
        likes = np.array([r.like_count for r in members], dtype=np.float64)
        rts = np.array([r.retweet_count for r in members], dtype=np.float64)
        rows.append(
            EngagementRow(
                group_key=key[0],
                country=key[1],
                count=len(members),
                share=len(members) / total,
                like_mean=float(likes.mean()),
                like_std=float(likes.std()),
                retweet_mean=float(rts.mean()),
                retweet_std=float(rts.std()),
            )
        )
    return rows


def country_bucket(label: CountryLabel) -> str:
    """India / Pakistan / Other; the unknowns fold into Other."""
    return label.value if label.value in ("India", "Pakistan") else "Other"


def hashtag_counts(
    corpus: Corpus,
    groups: list[HashtagGroup],
    countries: Mapping[str, CountryLabel],
) -> list[dict]:
    """Tweet counts per exact variant spelling and per country bucket.

    The final "All" row carries the column sums over the variant rows (a
    tweet using two tracked variants contributes to both rows).
    """
    variants = [(g.group_id, v) for g in groups for v in sorted(g.display_variants)]
    rows = []
    totals = Counter()
    for gid, variant in variants:
        wanted = variant.lower()
        members = [
            rec for rec in corpus if any(h.lower() == wanted for h in rec.hashtags)
        ]
        row = {
            "group_id": gid,
            "variant": variant,
            "total": len(members),
            "india": 0,
            "pakistan": 0,
        }
        for rec in members:
            bucket = country_bucket(countries[rec.id])
            if bucket == "India":
                row["india"] += 1
            elif bucket == "Pakistan":
                row["pakistan"] += 1
        rows.append(row)
        totals.update({"total": row["total"], "india": row["india"], "pakistan": row["pakistan"]})
    rows.append(
        {
            "group_id": "all",
            "variant": "All",
            "total": totals["total"],
            "india": totals["india"],
            "pakistan": totals["pakistan"],
        }
    )
    return rows


def term_frequencies(tweets: Iterable[CleanText], top_n: int) -> list[tuple[str, int]]:
    """Most frequent tokens, descending count with lexicographic tie order;
    the export feeds external word-cloud rendering."""
    if top_n < 1:
        raise DataError("top_n must be >= 1")
    counts: Counter = Counter()
    for ct in tweets:
        counts.update(ct.tokens)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ordered[:top_n]
