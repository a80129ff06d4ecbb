"""Positive-class classification metrics (supportive = positive)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DataError


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


def compute_metrics(predictions: Sequence[int], gold: Sequence[int]) -> Metrics:
    """Confusion counts plus precision/recall/F1 for the positive class.

    Zero-division cases (e.g. an all-negative predictor) report 0.
    """
    if len(predictions) != len(gold):
        raise DataError(
            f"length mismatch: {len(predictions)} predictions vs {len(gold)} gold labels"
        )
    if not predictions:
        raise DataError("cannot compute metrics on an empty evaluation set")
    tp = fp = fn = tn = 0
    for p, g in zip(predictions, gold):
        if p == 1 and g == 1:
            tp += 1
        elif p == 1:
            fp += 1
        elif g == 1:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn, tn=tn)
