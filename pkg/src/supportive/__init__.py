"""Weak-supervision toolkit for detecting supportive social-media content.

Pipeline: hashtag-partitioned corpus ingestion, pluggable probability
scorers, informed-sampling dataset construction, discriminability
statistics, linear classifier training/evaluation, inter-annotator
agreement, and engagement analytics.
"""

from .agreement import AnnotationMatrix, GoldLabels, fleiss_kappa, majority_gold, merge_adjudication
from .cleaning import CleanText, clean, extract_flag_codes, passes_length_filter
from .corpus import (
    Corpus,
    CorpusPartition,
    CountryLabel,
    HashtagGroup,
    TweetRecord,
    infer_country,
    jaccard,
    load_corpus,
    load_hashtag_groups,
    partition,
)
from .linear import LinearClassifier, LinearModel, predict_proba, train, train_scorer
from .metrics import Metrics, compute_metrics
from .scorers import BuiltinScorer, ExternalScorer, ScorerHub, ScoreTable, rank
from .tfidf import SparseVector, TfidfVectorizer, Vocabulary, fit_vocabulary, vectorize
from .weaklabel import (
    PairRate,
    WeakDataset,
    build_eval_sample,
    build_hashtag_baseline,
    build_informed,
    pairwise_rate,
    repeated_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationMatrix",
    "BuiltinScorer",
    "CleanText",
    "Corpus",
    "CorpusPartition",
    "CountryLabel",
    "ExternalScorer",
    "GoldLabels",
    "HashtagGroup",
    "LinearClassifier",
    "LinearModel",
    "Metrics",
    "PairRate",
    "ScoreTable",
    "ScorerHub",
    "SparseVector",
    "TfidfVectorizer",
    "TweetRecord",
    "Vocabulary",
    "WeakDataset",
    "build_eval_sample",
    "build_hashtag_baseline",
    "build_informed",
    "clean",
    "compute_metrics",
    "extract_flag_codes",
    "fit_vocabulary",
    "fleiss_kappa",
    "infer_country",
    "jaccard",
    "load_corpus",
    "load_hashtag_groups",
    "majority_gold",
    "merge_adjudication",
    "pairwise_rate",
    "partition",
    "passes_length_filter",
    "predict_proba",
    "rank",
    "repeated_rate",
    "train",
    "train_scorer",
    "vectorize",
]
