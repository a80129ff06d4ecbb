"""Multi-rater agreement: Fleiss' kappa, majority gold labels, adjudication.

Annotation sheets are tab-separated with a header row
``id<TAB>text<TAB>annotator_1..annotator_k``; an empty cell is a missing
label. The round number lives in the filename suffix
(e.g. ``eval.sheet.round1.tsv``).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .errors import DataError

UNANIMOUS = "unanimous"
MAJORITY = "majority"
UNRESOLVED = "unresolved"


@dataclass
class AnnotationMatrix:
    labels: dict[str, dict[str, str]]  # item id -> annotator -> label
    annotators: tuple[str, ...]
    round: int = 1
    texts: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.annotators) < 2:
            raise DataError("an annotation matrix needs at least 2 annotators")
        if not self.labels:
            raise DataError("an annotation matrix needs at least 1 item")

    def item_counts(self, item: str) -> Counter:
        return Counter(self.labels[item].values())

    def categories(self) -> list[str]:
        cats = set()
        for row in self.labels.values():
            cats.update(row.values())
        return sorted(cats)


@dataclass(frozen=True)
class GoldLabels:
    labels: dict[str, Optional[str]]
    resolution: dict[str, str]  # item id -> unanimous | majority | unresolved

    def unresolved_items(self) -> list[str]:
        return sorted(i for i, r in self.resolution.items() if r == UNRESOLVED)


def fleiss_kappa(m: AnnotationMatrix) -> float:
    """Chance-corrected agreement for categorical multi-rater labels.

    Items may have different rater counts (each uses its own n); every item
    needs at least two labels. When expected agreement is 1 (a single
    category across the board) observed agreement is necessarily 1 too and
    kappa is defined as 1.
    """
    per_item = []
    category_totals: Counter = Counter()
    total_labels = 0
    for item in m.labels:
        counts = m.item_counts(item)
        n = sum(counts.values())
        if n < 2:
            raise DataError(f"item {item!r} has {n} labels; kappa needs >= 2")
        agree = sum(c * (c - 1) for c in counts.values()) / (n * (n - 1))
        per_item.append(agree)
        category_totals.update(counts)
        total_labels += n
    p_bar = sum(per_item) / len(per_item)
    p_exp = sum((c / total_labels) ** 2 for c in category_totals.values())
    if p_exp == 1.0:
        return 1.0
    return (p_bar - p_exp) / (1.0 - p_exp)


def majority_gold(m: AnnotationMatrix) -> GoldLabels:
    """Per-item gold label: unanimity, else strict plurality, else
    unresolved (flagged for the next adjudication round)."""
    labels: dict[str, Optional[str]] = {}
    resolution: dict[str, str] = {}
    for item in m.labels:
        counts = m.item_counts(item)
        if len(counts) == 1:
            labels[item] = next(iter(counts))
            resolution[item] = UNANIMOUS
            continue
        (top, top_n), (_, second_n) = counts.most_common(2)
        if top_n > second_n:
            labels[item] = top
            resolution[item] = MAJORITY
        else:
            labels[item] = None
            resolution[item] = UNRESOLVED
    return GoldLabels(labels=labels, resolution=resolution)


def merge_adjudication(
    base: AnnotationMatrix, revisions: AnnotationMatrix
) -> AnnotationMatrix:
    """Overlay a follow-up round: revised labels overwrite, everything else
    persists. Revision items must exist in the base sheet and the revision
    round must be base.round + 1."""
    if revisions.round != base.round + 1:
        raise DataError(
            f"revision round {revisions.round} does not follow base round {base.round}"
        )
    unknown = set(revisions.labels) - set(base.labels)
    if unknown:
        raise DataError(f"revisions contain unknown item ids, e.g. {sorted(unknown)[0]!r}")
    merged = {item: dict(row) for item, row in base.labels.items()}
    for item, row in revisions.labels.items():
        merged[item].update(row)
    annotators = tuple(
        dict.fromkeys(list(base.annotators) + list(revisions.annotators))
    )
    texts = dict(base.texts)
    texts.update(revisions.texts)
    return AnnotationMatrix(
        labels=merged, annotators=annotators, round=revisions.round, texts=texts
    )


_ROUND_RE = re.compile(r"round(\d+)")


def round_from_filename(path) -> int:
    match = _ROUND_RE.search(str(path))
    return int(match.group(1)) if match else 1


def write_sheet(
    path,
    rows,
    annotators: tuple[str, ...] = ("annotator_1", "annotator_2", "annotator_3"),
):
    """rows: iterable of (id, text, {annotator: label}) triples; labels may
    be empty for a blank sheet."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(["id", "text"] + list(annotators)) + "\n")
        for item_id, text, labels in rows:
            cells = [item_id, text.replace("\t", " ").replace("\n", " ")]
            cells += [labels.get(a, "") for a in annotators]
            fh.write("\t".join(cells) + "\n")


def read_sheet(path, round: int | None = None) -> AnnotationMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["id", "text"] or len(header) < 4:
            raise DataError(
                f"{path}: expected header 'id<TAB>text<TAB>annotator_1...' "
                f"with >= 2 annotator columns"
            )
        annotators = tuple(header[2:])
        labels: dict[str, dict[str, str]] = {}
        texts: dict[str, str] = {}
        for lineno, line in enumerate(fh, 2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} columns")
            item_id, text = cells[0], cells[1]
            row = {
                a: cell.strip()
                for a, cell in zip(annotators, cells[2:])
                if cell.strip()
            }
            labels[item_id] = row
            texts[item_id] = text
    return AnnotationMatrix(
        labels=labels,
        annotators=annotators,
        round=round if round is not None else round_from_filename(path),
        texts=texts,
    )
