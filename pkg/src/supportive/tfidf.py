"""TF-IDF document features over cleaned tweets.

tf is the raw in-document term count, idf = ln((1+N)/(1+df)) + 1, and each
nonzero vector is L2-normalized. Vocabulary order is lexicographic so fitted
state is reproducible byte-for-byte.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .cleaning import CleanText
from .errors import DataError
from .estimator import BaseEstimator, check_is_fitted


@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]  # term -> dense index, lexicographic
    document_frequency: dict[str, int]
    n_documents: int

    def __len__(self):
        return len(self.index)

    @property
    def terms(self) -> list[str]:
        return sorted(self.index, key=self.index.get)


@dataclass(frozen=True)
class SparseVector:
    indices: np.ndarray  # strictly increasing int32
    values: np.ndarray  # float64, aligned with indices
    dim: int

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))


def fit_vocabulary(docs: list[CleanText], min_df: int = 1) -> Vocabulary:
    if not docs:
        raise DataError("cannot fit a vocabulary on zero documents")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    kept = sorted(t for t, c in df.items() if c >= min_df)
    if not kept:
        raise DataError(f"all terms filtered out at min_df={min_df}")
    return Vocabulary(
        index={t: i for i, t in enumerate(kept)},
        document_frequency={t: df[t] for t in kept},
        n_documents=len(docs),
    )


def _idf(vocab: Vocabulary) -> np.ndarray:
    n = vocab.n_documents
    out = np.empty(len(vocab), dtype=np.float64)
    for term, i in vocab.index.items():
        out[i] = math.log((1 + n) / (1 + vocab.document_frequency[term])) + 1.0
    return out


def vectorize(doc: CleanText, vocab: Vocabulary, idf: np.ndarray | None = None) -> SparseVector:
    """tf·idf for one document, L2-normalized; OOV terms are ignored.

    A document with no in-vocabulary terms yields the zero vector.
    """
    if idf is None:
        idf = _idf(vocab)
    counts = Counter(doc.tokens)
    pairs = sorted(
        (vocab.index[t], c) for t, c in counts.items() if t in vocab.index
    )
    if not pairs:
        return SparseVector(
            indices=np.empty(0, dtype=np.int32),
            values=np.empty(0, dtype=np.float64),
            dim=len(vocab),
        )
    idx = np.fromiter((i for i, _ in pairs), dtype=np.int32, count=len(pairs))
    vals = np.fromiter((c for _, c in pairs), dtype=np.float64, count=len(pairs))
    vals *= idf[idx]
    vals /= np.sqrt(np.dot(vals, vals))
    return SparseVector(indices=idx, values=vals, dim=len(vocab))


class TfidfVectorizer(BaseEstimator):
    """fit/transform wrapper over the vocabulary + tf-idf operations."""

    def __init__(self, min_df: int = 1):
        self.min_df = min_df

    def fit(self, docs: list[CleanText], y=None):
        self.vocabulary_ = fit_vocabulary(docs, min_df=self.min_df)
        self.idf_ = _idf(self.vocabulary_)
        return self

    def transform(self, docs: list[CleanText]) -> list[SparseVector]:
        check_is_fitted(self, "vocabulary_")
        return [vectorize(d, self.vocabulary_, self.idf_) for d in docs]

    def fit_transform(self, docs: list[CleanText], y=None) -> list[SparseVector]:
        return self.fit(docs).transform(docs)
