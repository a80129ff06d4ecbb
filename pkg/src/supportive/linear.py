"""Seeded linear classifiers over sparse tf-idf features.

Training is plain stochastic subgradient descent with L2 regularization and
a per-epoch decaying step size; given the same data and seed the fitted
weights are bit-identical. The logistic kind minimizes log loss and yields
calibrated-ish probabilities; the hinge kind is the SVM-style baseline, and
its "probability" is the sigmoid of the raw margin (uncalibrated, fine for
classification and ranking).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ModelFormatError
from .estimator import BaseEstimator, check_is_fitted
from .tfidf import SparseVector, TfidfVectorizer, Vocabulary

MODEL_FORMAT_VERSION = 1


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    kind: str  # logistic | hinge
    training_seed: int
    config: dict = field(default_factory=dict)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


def _margin(model: LinearModel, v: SparseVector) -> float:
    if v.dim != len(model.weights):
        raise DataError(
            f"dimension mismatch: vector has {v.dim} features, "
            f"model has {len(model.weights)}"
        )
    if v.nnz == 0:
        return model.bias
    return float(model.weights[v.indices] @ v.values + model.bias)


def _objective(model, X, y_signed, l2):
    total = 0.0
    for v, y in zip(X, y_signed):
        z = y * _margin(model, v)
        if model.kind == "hinge":
            total += max(0.0, 1.0 - z)
        else:
            # log(1 + exp(-z)) computed stably
            total += np.logaddexp(0.0, -z)
    w = model.weights
    return total / len(X) + 0.5 * l2 * float(w @ w)


def train(
    data: list[tuple[SparseVector, int]],
    kind: str = "logistic",
    seed: int = 0,
    epochs: int = 20,
    learning_rate: float = 0.1,
    l2: float = 1e-4,
) -> LinearModel:
    """Fit weights by seeded SGD. Labels are 0/1; both must be present."""
    if kind not in ("logistic", "hinge"):
        raise ValueError(f"unknown model kind {kind!r}")
    labels = {y for _, y in data}
    if labels != {0, 1}:
        raise DataError(
            f"training data must contain both classes, got labels {sorted(labels)}"
        )
    dim = data[0][0].dim
    for v, _ in data:
        if v.dim != dim:
            raise DataError("inconsistent feature dimensions in training data")

    X = [v for v, _ in data]
    y_signed = np.array([1.0 if y == 1 else -1.0 for _, y in data])
    rng = np.random.default_rng(seed)
    model = LinearModel(
        weights=np.zeros(dim, dtype=np.float64),
        bias=0.0,
        kind=kind,
        training_seed=seed,
        config={"epochs": epochs, "learning_rate": learning_rate, "l2": l2},
    )
    w = model.weights
    loss_history = []
    for epoch in range(epochs):
        eta = learning_rate / (1.0 + epoch)
        for i in rng.permutation(len(X)):
            v, y = X[i], y_signed[i]
            z = y * _margin(model, v)
            if kind == "hinge":
                coef = -y if z < 1.0 else 0.0
            else:
                coef = -y * _sigmoid(-z)
            w *= 1.0 - eta * l2
            if coef != 0.0 and v.nnz:
                w[v.indices] -= eta * coef * v.values
            if coef != 0.0:
                model.bias -= eta * coef
        loss_history.append(_objective(model, X, y_signed, l2))
    model.config["loss_history"] = loss_history
    return model


def predict_proba(model: LinearModel, v: SparseVector) -> float:
    """sigmoid(w·v + b); strictly monotone in the decision margin."""
    return float(_sigmoid(_margin(model, v)))


def predict(model: LinearModel, v: SparseVector, threshold: float = 0.5) -> int:
    # Ties at exactly the threshold classify positive.
    return 1 if predict_proba(model, v) >= threshold else 0


class LinearClassifier(BaseEstimator):
    """Estimator wrapper: fit(X, y) / predict / predict_proba over
    SparseVector features."""

    def __init__(self, kind="logistic", seed=0, epochs=20, learning_rate=0.1, l2=1e-4):
        self.kind = kind
        self.seed = seed
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.l2 = l2

    def fit(self, X: list[SparseVector], y):
        self.model_ = train(
            list(zip(X, y)),
            kind=self.kind,
            seed=self.seed,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            l2=self.l2,
        )
        return self

    def decision_function(self, X: list[SparseVector]) -> np.ndarray:
        check_is_fitted(self, "model_")
        return np.array([_margin(self.model_, v) for v in X])

    def predict_proba(self, X: list[SparseVector]) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def predict(self, X: list[SparseVector]) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


def save_model(path, model: LinearModel, vocab: Vocabulary):
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "seed": model.training_seed,
        "bias": model.bias,
        "weights": model.weights.tolist(),
        "config": {
            k: v for k, v in model.config.items() if k != "loss_history"
        },
        "vocabulary": {
            "terms": [[t, vocab.document_frequency[t]] for t in vocab.terms],
            "n_documents": vocab.n_documents,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> tuple[LinearModel, Vocabulary]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported model format version {version!r} "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    terms = payload["vocabulary"]["terms"]
    vocab = Vocabulary(
        index={t: i for i, (t, _) in enumerate(terms)},
        document_frequency={t: df for t, df in terms},
        n_documents=payload["vocabulary"]["n_documents"],
    )
    model = LinearModel(
        weights=np.asarray(payload["weights"], dtype=np.float64),
        bias=float(payload["bias"]),
        kind=payload["kind"],
        training_seed=int(payload["seed"]),
        config=dict(payload.get("config", {})),
    )
    if len(model.weights) != len(vocab):
        raise ModelFormatError(f"{path}: weight/vocabulary size mismatch")
    return model, vocab


def make_vectorizer(vocab: Vocabulary, min_df: int = 1) -> TfidfVectorizer:
    """Rebuild a ready-to-use vectorizer from a loaded vocabulary."""
    vec = TfidfVectorizer(min_df=min_df)
    vec.vocabulary_ = vocab
    from .tfidf import _idf

    vec.idf_ = _idf(vocab)
    return vec


def load_seed_dataset(path) -> list[tuple[str, int]]:
    """Line-delimited (text, label) scorer training file; labels are 0/1."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                text, label = obj["text"], int(obj["label"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad seed record: {exc}") from exc
            if label not in (0, 1):
                raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {label}")
            rows.append((text, label))
    if not rows:
        raise DataError(f"{path}: empty seed dataset")
    return rows


def train_scorer(
    rows: list[tuple[str, int]],
    kind: str = "logistic",
    seed: int = 0,
    train_fraction: float = 0.9,
    min_df: int = 1,
    epochs: int = 20,
    learning_rate: float = 0.1,
    l2: float = 1e-4,
) -> tuple[LinearModel, Vocabulary, float]:
    """Fit a scorer on cleaned seed texts with a seeded train/test split;
    returns (model, vocabulary, held-out accuracy)."""
    from .cleaning import clean

    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must be in (0,1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(rows))
    n_train = max(1, int(round(train_fraction * len(rows))))
    if n_train >= len(rows):
        n_train = len(rows) - 1
    train_rows = [rows[i] for i in order[:n_train]]
    test_rows = [rows[i] for i in order[n_train:]]

    docs = [clean(t) for t, _ in train_rows]
    vec = TfidfVectorizer(min_df=min_df).fit(docs)
    model = train(
        list(zip(vec.transform(docs), [y for _, y in train_rows])),
        kind=kind,
        seed=seed,
        epochs=epochs,
        learning_rate=learning_rate,
        l2=l2,
    )
    test_docs = vec.transform([clean(t) for t, _ in test_rows])
    correct = sum(
        1
        for v, (_, y) in zip(test_docs, test_rows)
        if predict(model, v) == y
    )
    accuracy = correct / len(test_rows)
    return model, vec.vocabulary_, accuracy
