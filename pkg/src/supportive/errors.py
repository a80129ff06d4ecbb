"""Exception hierarchy shared across the pipeline.

Each class carries the CLI exit code used when the error surfaces at the
command line.
"""


class PipelineError(Exception):
    exit_code = 1


class ConfigError(PipelineError):
    """Bad configuration: malformed config file, overlapping hashtag variants,
    out-of-range parameters."""

    exit_code = 2


class MissingArtifactError(PipelineError):
    """A required upstream artifact is absent; the message names the
    subcommand that produces it."""

    exit_code = 3


class DataError(PipelineError):
    """Invalid or insufficient data: empty corpus, single-class training set,
    undefined statistics, partition side too small."""

    exit_code = 4


class ScorerError(PipelineError):
    """External scorer failure of any kind."""

    exit_code = 5


class ScoringError(ScorerError):
    """An external scorer crashed, timed out, or stopped answering; the
    message names the scorer and the first unanswered tweet id."""


class ScorerProtocolError(ScorerError):
    """An external scorer violated wire protocol v1 (bad handshake,
    out-of-range probability, unmatched or duplicate ids)."""


class ModelFormatError(DataError):
    """A serialized model file has an unknown version tag or is corrupt."""
