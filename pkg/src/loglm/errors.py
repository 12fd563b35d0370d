"""Exception types shared across the toolkit."""

from __future__ import annotations


class LoglmError(Exception):
    """Base class for all toolkit errors."""


class MalformedLine(LoglmError):
    """A raw log line did not match the format's header pattern."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class EmptyInput(LoglmError):
    """No records survived parsing."""


class ContextOverflow(LoglmError):
    """Input sequence is longer than the model's context window."""


class IndexOutOfVocab(LoglmError):
    """A key index is outside the model's vocabulary."""


class SequenceTooShort(LoglmError):
    """A sequence has no next-key transition to score."""


class EmptyCorpus(LoglmError):
    """Training was requested on an empty corpus."""


class KOutOfRange(LoglmError):
    """Top-K size is outside [1, key_count]."""


class InvalidK(LoglmError):
    """A K specifier could not be resolved to a candidate-list size."""


class StalePolicy(LoglmError):
    """Episode traces were generated under a different parameter version."""


class EmptyResults(LoglmError):
    """Metric evaluation was requested on an empty result list."""


class InvalidSpec(LoglmError):
    """A synthetic corpus specification is inconsistent."""


class InsufficientData(LoglmError):
    """A corpus split would leave one of the splits empty."""


class MissingArtifact(LoglmError):
    """A pipeline stage requires an artifact that does not exist."""

    def __init__(self, path: str):
        super().__init__(f"missing artifact: {path}")
        self.path = path
