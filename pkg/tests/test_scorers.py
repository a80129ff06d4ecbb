import sys

import numpy as np
import pytest

from supportive.cleaning import clean
from supportive.errors import DataError, ScorerProtocolError, ScoringError
from supportive.linear import predict_proba, train
from supportive.scorers import (
    BuiltinScorer,
    ExternalScorer,
    ScorerHub,
    ScoreTable,
    check_protocol_conformance,
    rank,
)
from supportive.tfidf import TfidfVectorizer, vectorize

ECHO = [sys.executable, "-m", "supportive.echo_scorer"]


def tweets_of(*texts):
    return [(f"t{i:03d}", clean(t)) for i, t in enumerate(texts)]


def make_builtin(name="hope", seed=0):
    texts = ["peace and hope here", "war and anger there", "hope hope peace", "anger war hate"]
    docs = [clean(t) for t in texts]
    vec = TfidfVectorizer().fit(docs)
    model = train(list(zip(vec.transform(docs), [1, 0, 1, 0])), seed=seed)
    return BuiltinScorer(name, model, vec.vocabulary_), model, vec


class TestBuiltin:
    def test_matches_direct_predict_proba(self):
        scorer, model, vec = make_builtin()
        tweets = tweets_of("hope for peace", "war there", "nothing related at all")
        got = scorer.score_batch(tweets)
        for tid, ct in tweets:
            direct = predict_proba(model, vectorize(ct, vec.vocabulary_))
            assert got[tid] == direct

    def test_version_tracks_weights(self):
        s1, _, _ = make_builtin(seed=0)
        s2, _, _ = make_builtin(seed=1)
        assert s1.version != s2.version


class TestExternal:
    def test_constant_scorer(self):
        with ExternalScorer(ECHO + ["--p", "0.9"]) as scorer:
            assert scorer.name == "echo"
            got = scorer.score_batch(tweets_of("a", "b", "c"))
        assert list(got.values()) == [0.9, 0.9, 0.9]

    def test_out_of_order_responses(self):
        tweets = tweets_of(*[f"text number {i}" for i in range(8)])
        with ExternalScorer(ECHO + ["--mode", "hash", "--reverse-every", "4"]) as s:
            got = s.score_batch(tweets)
        with ExternalScorer(ECHO + ["--mode", "hash"]) as s:
            ordered = s.score_batch(tweets)
        assert got == ordered

    def test_out_of_range_probability(self):
        with pytest.raises(ScorerProtocolError):
            with ExternalScorer(ECHO + ["--break-protocol", "range"]) as s:
                s.score_batch(tweets_of("a"))

    def test_wrong_id(self):
        with pytest.raises(ScorerProtocolError):
            with ExternalScorer(ECHO + ["--break-protocol", "wrong-id"]) as s:
                s.score_batch(tweets_of("a"))

    def test_crash_names_scorer_and_id(self):
        with pytest.raises(ScoringError) as err:
            with ExternalScorer(ECHO + ["--break-protocol", "die"]) as s:
                s.score_batch(tweets_of("a"))
        assert "echo" in str(err.value) and "t000" in str(err.value)

    def test_timeout(self):
        # a huge reverse buffer never flushes, so the reply never comes
        cmd = ECHO + ["--reverse-every", "1000"]
        with pytest.raises(ScoringError) as err:
            with ExternalScorer(cmd, timeout=1.0) as s:
                s.score_batch(tweets_of("a", "b"))
        assert "timed out" in str(err.value)

    def test_bad_command(self):
        with pytest.raises(ScoringError):
            ExternalScorer(["/nonexistent/scorer-binary"])

    def test_name_mismatch(self):
        with pytest.raises(ScorerProtocolError):
            ExternalScorer(ECHO + ["--name", "other"], name="hope")


class TestHub:
    def test_builtin_and_external_complete_table(self):
        hub = ScorerHub()
        scorer, _, _ = make_builtin("hope")
        hub.register(scorer)
        hub.register(ExternalScorer(ECHO + ["--name", "empathy", "--p", "0.25"]))
        tweets = tweets_of("peace hope", "war anger", "neutral words")
        with hub:
            table = hub.score_corpus(tweets, corpus_fingerprint="fp")
        assert len(table) == 3
        assert table.scorers == ("hope", "empathy")
        for tid, _ in tweets:
            assert table.get(tid, "empathy") == 0.25

    def test_duplicate_name_rejected(self):
        hub = ScorerHub()
        scorer, _, _ = make_builtin("hope")
        hub.register(scorer)
        other, _, _ = make_builtin("hope")
        with pytest.raises(DataError):
            hub.register(other)

    def test_rescoring_identical(self):
        hub = ScorerHub()
        scorer, _, _ = make_builtin("hope")
        hub.register(scorer)
        tweets = tweets_of("peace hope", "war anger")
        t1 = hub.score_corpus(tweets, corpus_fingerprint="fp")
        t2 = hub.score_corpus(tweets, corpus_fingerprint="fp")
        assert t1.scores == t2.scores
        assert t1.scorer_versions == t2.scorer_versions

    def test_empty_hub(self):
        with pytest.raises(DataError):
            ScorerHub().score_corpus(tweets_of("a"))


class TestScoreTable:
    def test_completeness_enforced(self):
        with pytest.raises(DataError):
            ScoreTable(scores={"a": {"hope": 0.5}}, scorers=("hope", "empathy"))

    def test_range_enforced(self):
        with pytest.raises(DataError):
            ScoreTable(scores={"a": {"hope": 1.5}}, scorers=("hope",))

    def test_save_load_round_trip(self, tmp_path):
        table = ScoreTable(
            scores={"a": {"hope": 0.25}, "b": {"hope": 0.75}},
            scorers=("hope",),
            corpus_fingerprint="fp",
            scorer_versions={"hope": "v1"},
        )
        p = tmp_path / "scores.jsonl"
        table.save(p)
        loaded = ScoreTable.load(p)
        assert loaded.scores == table.scores
        assert loaded.scorers == table.scorers
        assert loaded.corpus_fingerprint == "fp"


class TestRank:
    def table(self, scores):
        return ScoreTable(
            scores={k: {"hope": v} for k, v in scores.items()}, scorers=("hope",)
        )

    def test_two_elements(self):
        t = self.table({"a": 0.9, "b": 0.1})
        assert rank(t, "hope", ["a", "b"]) == ["a", "b"]

    def test_all_equal_uses_id_order(self):
        t = self.table({"c": 0.5, "a": 0.5, "b": 0.5})
        assert rank(t, "hope", ["c", "a", "b"]) == ["a", "b", "c"]

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(17)
        scores = {f"t{i:04d}": float(rng.random()) for i in range(1000)}
        t = self.table(scores)
        got = rank(t, "hope", scores)
        oracle = [
            tid for _, tid in sorted(((-p, tid) for tid, p in scores.items()))
        ]
        assert got == oracle
        assert sorted(got) == sorted(scores)

    def test_unknown_scorer(self):
        t = self.table({"a": 0.5})
        with pytest.raises(DataError):
            rank(t, "empathy", ["a"])
        with pytest.raises(DataError):
            rank(t, "hope", ["zz"])


def test_echo_stub_passes_conformance():
    report = check_protocol_conformance(ECHO + ["--mode", "hash"], n_requests=10)
    assert report["name"] == "echo"
    assert len(report["scores"]) == 10
    assert all(0.0 <= p <= 1.0 for p in report["scores"].values())
