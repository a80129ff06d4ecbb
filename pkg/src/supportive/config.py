"""Pipeline configuration: a single YAML file owns every constant.

Command-line flags may override individual fields; overrides are recorded in
each output's provenance block. The config fingerprint covers the pipeline
semantics only; the output directory is excluded so two runs into different
directories stay fingerprint-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from pathlib import Path

import yaml

from .errors import ConfigError
from .provenance import fingerprint


@dataclass
class ScorerSpec:
    name: str
    kind: str  # builtin | external
    train_data: str | None = None  # builtin: seed dataset path
    model_kind: str = "logistic"
    command: list[str] = field(default_factory=list)  # external: argv

    def validate(self):
        if self.kind not in ("builtin", "external"):
            raise ConfigError(f"scorer {self.name!r}: kind must be builtin or external")
        if self.kind == "builtin" and not self.train_data:
            raise ConfigError(f"scorer {self.name!r}: builtin scorers need train_data")
        if self.kind == "external" and not self.command:
            raise ConfigError(f"scorer {self.name!r}: external scorers need a command")


@dataclass
class PipelineConfig:
    corpus: str = "corpus.jsonl"
    groups: str = "groups.txt"
    output_dir: str = "out"
    min_tokens: int = 10
    min_df: int = 1
    top_k: int = 1000
    neg_per_list: int = 500
    bottom_frac: float = 0.8
    n_pairs: int = 100_000
    runs: int = 5
    eval_n: int = 1000
    split: list[float] = field(default_factory=lambda: [0.9, 0.1])
    seed: int = 7
    epochs: int = 20
    learning_rate: float = 0.1
    l2: float = 1e-4
    exclude_eval_from_weak: bool = True
    scorer_timeout: float = 60.0
    scorer_batch_size: int = 256
    annotators: int = 3
    scorers: dict[str, ScorerSpec] = field(default_factory=dict)

    def validate(self):
        positive = [
            ("min_tokens", self.min_tokens, True),
            ("min_df", self.min_df, False),
            ("top_k", self.top_k, False),
            ("neg_per_list", self.neg_per_list, False),
            ("n_pairs", self.n_pairs, False),
            ("runs", self.runs, False),
            ("eval_n", self.eval_n, False),
            ("epochs", self.epochs, False),
            ("annotators", self.annotators, False),
        ]
        for name, value, zero_ok in positive:
            if value < 0 or (value == 0 and not zero_ok):
                raise ConfigError(f"{name} must be positive, got {value}")
        if not 0.0 < self.bottom_frac < 1.0:
            raise ConfigError(f"bottom_frac must be in (0,1), got {self.bottom_frac}")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.l2 < 0:
            raise ConfigError("l2 must be non-negative")
        if len(self.split) != 2 or abs(sum(self.split) - 1.0) > 1e-9 or min(self.split) <= 0:
            raise ConfigError(f"split fractions must be two positives summing to 1, got {self.split}")
        for spec in self.scorers.values():
            spec.validate()
        return self

    def fingerprint(self) -> str:
        data = asdict(self)
        data.pop("output_dir")
        return fingerprint(data)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a mapping")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config fields {sorted(unknown)}")
        scorers = {}
        for name, spec in (raw.pop("scorers", None) or {}).items():
            if not isinstance(spec, dict):
                raise ConfigError(f"{path}: scorer {name!r} must be a mapping")
            try:
                scorers[name] = ScorerSpec(name=name, **spec)
            except TypeError as exc:
                raise ConfigError(f"{path}: scorer {name!r}: {exc}") from exc
        try:
            cfg = cls(**raw, scorers=scorers)
        except TypeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cfg.validate()

    def apply_overrides(self, overrides: dict) -> dict:
        """Set fields from CLI flags; returns the applied overrides for the
        provenance block."""
        applied = {}
        for name, value in overrides.items():
            if value is None:
                continue
            if name not in self.__dataclass_fields__:
                raise ConfigError(f"unknown override {name!r}")
            setattr(self, name, value)
            applied[name] = value
        if applied:
            self.validate()
        return applied
