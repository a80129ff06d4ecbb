"""Uniform scorer abstraction producing per-tweet probabilities.

Builtin scorers wrap a fitted linear model; external scorers are child
processes speaking wire protocol v1 over their standard streams:

    handshake  ->  {"op": "hello"}
               <-  {"protocol": 1, "name": "<scorer name>"}
    request    ->  {"id": "<tweet id>", "text": "<cleaned text>"}
    response   <-  {"id": "<tweet id>", "p": <number in [0, 1]>}

Responses may arrive out of order within a batch; ids must match 1:1.
A crash, a timeout, or an out-of-range probability aborts the run: weak
labels built from imputed scores would be worse than no run.
"""

from __future__ import annotations

import hashlib
import json
import queue
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cleaning import CleanText, clean
from .errors import DataError, ScorerProtocolError, ScoringError
from .linear import LinearModel, predict_proba
from .tfidf import Vocabulary, vectorize, _idf

PROTOCOL_VERSION = 1
DEFAULT_BATCH_SIZE = 256
DEFAULT_TIMEOUT = 60.0


@dataclass
class ScoreTable:
    scores: dict[str, dict[str, float]]  # tweet id -> scorer name -> p
    scorers: tuple[str, ...]
    corpus_fingerprint: str = ""
    scorer_versions: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for tid, row in self.scores.items():
            missing = set(self.scorers) - set(row)
            if missing:
                raise DataError(f"tweet {tid} lacks scores from {sorted(missing)}")
            for name, p in row.items():
                if not 0.0 <= p <= 1.0:
                    raise DataError(f"score out of range for {tid}/{name}: {p}")

    def __len__(self):
        return len(self.scores)

    def get(self, tweet_id: str, scorer: str) -> float:
        return self.scores[tweet_id][scorer]

    def ids(self) -> set[str]:
        return set(self.scores)

    def save(self, path, extra_meta: dict | None = None):
        meta = {
            "kind": "score_table",
            "scorers": list(self.scorers),
            "scorer_versions": self.scorer_versions,
            "corpus_fingerprint": self.corpus_fingerprint,
        }
        if extra_meta:
            meta.update(extra_meta)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
            for tid in sorted(self.scores):
                fh.write(
                    json.dumps({"id": tid, "scores": self.scores[tid]}, sort_keys=True)
                    + "\n"
                )

    @classmethod
    def load(cls, path) -> "ScoreTable":
        with open(path, "r", encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            meta = header["_meta"]
            scores = {}
            for line in fh:
                obj = json.loads(line)
                scores[obj["id"]] = obj["scores"]
        return cls(
            scores=scores,
            scorers=tuple(meta["scorers"]),
            corpus_fingerprint=meta.get("corpus_fingerprint", ""),
            scorer_versions=meta.get("scorer_versions", {}),
        )


class BuiltinScorer:
    """Deterministic in-process scorer backed by a linear model."""

    def __init__(self, name: str, model: LinearModel, vocab: Vocabulary):
        self.name = name
        self.model = model
        self.vocab = vocab
        self._idf = _idf(vocab)
        h = hashlib.sha256()
        h.update(model.kind.encode())
        h.update(str(model.training_seed).encode())
        h.update(model.weights.tobytes())
        h.update(repr(model.bias).encode())
        self.version = h.hexdigest()[:16]

    @classmethod
    def from_file(cls, name: str, path) -> "BuiltinScorer":
        from .linear import load_model

        model, vocab = load_model(path)
        return cls(name, model, vocab)

    def score_batch(self, batch: Sequence[tuple[str, CleanText]]) -> dict[str, float]:
        return {
            tid: predict_proba(self.model, vectorize(ct, self.vocab, self._idf))
            for tid, ct in batch
        }

    def close(self):
        pass


class ExternalScorer:
    """Child-process scorer speaking wire protocol v1.

    A dedicated thread drains the child's stdout into a queue so request
    writes can never deadlock against a full pipe.
    """

    def __init__(
        self,
        command: Sequence[str],
        name: str | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        batch_size: int = DEFAULT_BATCH_SIZE,
    ):
        self.command = list(command)
        self.timeout = timeout
        self.batch_size = batch_size
        self.version = hashlib.sha256(" ".join(self.command).encode()).hexdigest()[:16]
        self._proc = None
        self._lines: queue.Queue = queue.Queue()
        self._start()
        try:
            self.name = self._handshake()
            if name is not None and name != self.name:
                raise ScorerProtocolError(
                    f"scorer announced name {self.name!r}, expected {name!r}"
                )
        except Exception:
            self.close()
            raise

    def _start(self):
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ScoringError(f"cannot start scorer {self.command}: {exc}") from exc
        self._reader = threading.Thread(target=self._drain, daemon=True)
        self._reader.start()

    def _drain(self):
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF marker

    def _send(self, obj: dict):
        try:
            self._proc.stdin.write(json.dumps(obj) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ScoringError(
                f"scorer {self.command[0]!r} closed its input: {exc}"
            ) from exc

    def _recv(self, context: str) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise ScoringError(
                f"scorer {getattr(self, 'name', self.command[0])!r} timed out "
                f"after {self.timeout}s waiting for {context}"
            ) from None
        if line is None:
            raise ScoringError(
                f"scorer {getattr(self, 'name', self.command[0])!r} exited "
                f"while {context} was pending"
            )
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScorerProtocolError(
                f"scorer sent a non-JSON line while {context} was pending: {line!r}"
            ) from exc

    def _handshake(self) -> str:
        self._send({"op": "hello"})
        reply = self._recv("the handshake")
        if reply.get("protocol") != PROTOCOL_VERSION or not isinstance(
            reply.get("name"), str
        ):
            raise ScorerProtocolError(
                f"bad handshake reply from {self.command[0]!r}: {reply!r}"
            )
        return reply["name"]

    def score_batch(self, batch: Sequence[tuple[str, CleanText]]) -> dict[str, float]:
        results: dict[str, float] = {}
        for start in range(0, len(batch), self.batch_size):
            chunk = batch[start : start + self.batch_size]
            pending = {tid for tid, _ in chunk}
            writer = threading.Thread(
                target=self._write_requests, args=(chunk,), daemon=True
            )
            writer.start()
            while pending:
                some_id = next(iter(pending))
                reply = self._recv(f"a response for id {some_id!r}")
                if "error" in reply:
                    raise ScorerProtocolError(
                        f"scorer {self.name!r} reported an error: {reply!r}"
                    )
                rid = reply.get("id")
                if rid not in pending:
                    raise ScorerProtocolError(
                        f"scorer {self.name!r} answered unknown or duplicate id {rid!r}"
                    )
                p = reply.get("p")
                if not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
                    raise ScorerProtocolError(
                        f"scorer {self.name!r} returned out-of-range probability "
                        f"{p!r} for id {rid!r}"
                    )
                results[rid] = float(p)
                pending.discard(rid)
            writer.join()
        return results

    def _write_requests(self, chunk):
        try:
            for tid, ct in chunk:
                text = ct.text if isinstance(ct, CleanText) else str(ct)
                self._proc.stdin.write(json.dumps({"id": tid, "text": text}) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError):
            pass  # dead or closed pipe; surfaced by the reader side as EOF

    def close(self):
        if self._proc is None:
            return
        try:
            self._proc.stdin.close()
        except OSError:
            pass
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ScorerHub:
    def __init__(self):
        self._scorers: dict[str, BuiltinScorer | ExternalScorer] = {}

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._scorers)

    def register(self, scorer):
        if scorer.name in self._scorers:
            raise DataError(f"scorer name {scorer.name!r} already registered")
        self._scorers[scorer.name] = scorer
        return scorer

    def versions(self) -> dict[str, str]:
        return {name: s.version for name, s in self._scorers.items()}

    def score_corpus(
        self,
        tweets: Sequence[tuple[str, CleanText]],
        corpus_fingerprint: str = "",
    ) -> ScoreTable:
        """Score every tweet with every registered scorer.

        Callers are expected to pass length-filtered, cleaned tweets.
        """
        if not self._scorers:
            raise DataError("no scorers registered")
        columns: dict[str, dict[str, float]] = {}
        for name, scorer in self._scorers.items():
            got = scorer.score_batch(list(tweets))
            missing = {tid for tid, _ in tweets} - set(got)
            if missing:
                raise ScoringError(
                    f"scorer {name!r} returned no score for id "
                    f"{sorted(missing)[0]!r} (and {len(missing) - 1} more)"
                )
            columns[name] = got
        scores = {
            tid: {name: columns[name][tid] for name in self._scorers}
            for tid, _ in tweets
        }
        return ScoreTable(
            scores=scores,
            scorers=self.names,
            corpus_fingerprint=corpus_fingerprint,
            scorer_versions=self.versions(),
        )

    def close(self):
        for scorer in self._scorers.values():
            scorer.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def rank(
    table: ScoreTable,
    scorer: str,
    ids: Iterable[str],
    descending: bool = True,
) -> list[str]:
    """Stable total order over `ids` by score; ties break by ascending id."""
    if scorer not in table.scorers:
        raise DataError(f"unknown scorer {scorer!r}; table has {list(table.scorers)}")
    ids = list(ids)
    unknown = [i for i in ids if i not in table.scores]
    if unknown:
        raise DataError(f"ids missing from score table, e.g. {unknown[0]!r}")
    if descending:
        return sorted(ids, key=lambda i: (-table.scores[i][scorer], i))
    return sorted(ids, key=lambda i: (table.scores[i][scorer], i))


def check_protocol_conformance(
    command: Sequence[str], n_requests: int = 10, timeout: float = DEFAULT_TIMEOUT
) -> dict:
    """Run the wire-protocol conformance checks against a scorer command.

    Verifies the handshake, a `n_requests`-message round trip with bijective
    ids, and the probability range. Raises ScorerError subclasses on any
    violation; returns a small report on success.
    """
    with ExternalScorer(command, timeout=timeout) as scorer:
        batch = [
            (f"conformance-{i:03d}", clean(f"sample text number {i}"))
            for i in range(n_requests)
        ]
        got = scorer.score_batch(batch)
        expected_ids = {tid for tid, _ in batch}
        if set(got) != expected_ids:
            raise ScorerProtocolError(
                f"ids not bijective: missing {sorted(expected_ids - set(got))}"
            )
        # Re-scoring the same text must be deterministic.
        again = scorer.score_batch(batch[:1])
        if again[batch[0][0]] != got[batch[0][0]]:
            raise ScorerProtocolError("scorer is not deterministic on repeated input")
        return {"name": scorer.name, "n_requests": n_requests, "scores": got}
