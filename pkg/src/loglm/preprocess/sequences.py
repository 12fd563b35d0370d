"""Grouping parsed records into labeled log-key sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from loglm.errors import EmptyInput
from loglm.preprocess.formats import RawLogRecord


@dataclass(frozen=True)
class LogKeySequence:
    """An ordered window or session of log keys with per-position labels."""

    sequence_id: str
    keys: tuple[int, ...]
    labels: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.keys) != len(self.labels):
            raise ValueError("keys and labels must have equal length")
        if len(self.keys) < 1:
            raise ValueError("a sequence holds at least one key")

    @property
    def sequence_label(self) -> bool:
        return any(self.labels)

    def __len__(self) -> int:
        return len(self.keys)


@dataclass(frozen=True)
class WindowStrategy:
    """Time windows of ``seconds`` starting every ``stride`` seconds.

    With ``stride == seconds`` (the default, tumbling) every record lands in
    exactly one window; a smaller stride yields overlapping windows.
    """

    seconds: int
    stride: int | None = None

    @property
    def effective_stride(self) -> int:
        return self.seconds if self.stride is None else self.stride


@dataclass(frozen=True)
class SessionStrategy:
    """Group by the records' session identifiers, preserving file order."""


GroupStrategy = WindowStrategy | SessionStrategy


def group_sequences(
    records: Sequence[RawLogRecord],
    key_indices: Sequence[int],
    strategy: GroupStrategy,
    max_context: int = 128,
) -> list[LogKeySequence]:
    """Group parsed records (with their mined key indices) into sequences.

    Sequence labels are the OR of member labels; groups longer than
    ``max_context`` are split into consecutive chunks.
    """
    if len(records) != len(key_indices):
        raise ValueError("records and key_indices must be parallel")
    if not records:
        raise EmptyInput("no records to group")

    if isinstance(strategy, SessionStrategy):
        groups = _group_by_session(records, key_indices)
    else:
        groups = _group_by_window(records, key_indices, strategy)

    sequences: list[LogKeySequence] = []
    for sequence_id, keys, labels in groups:
        sequences.extend(_split_chunks(sequence_id, keys, labels, max_context))
    return sequences


def _group_by_session(
    records: Sequence[RawLogRecord], key_indices: Sequence[int]
) -> list[tuple[str, list[int], list[bool]]]:
    order: list[str] = []
    by_session: dict[str, tuple[list[int], list[bool]]] = {}
    for record, key in zip(records, key_indices):
        if record.session_id is None:
            raise ValueError(f"record at line {record.line_no} has no session id")
        if record.session_id not in by_session:
            by_session[record.session_id] = ([], [])
            order.append(record.session_id)
        keys, labels = by_session[record.session_id]
        keys.append(key)
        labels.append(record.is_anomalous)
    return [(sid, *by_session[sid]) for sid in order]


def _group_by_window(
    records: Sequence[RawLogRecord],
    key_indices: Sequence[int],
    strategy: WindowStrategy,
) -> list[tuple[str, list[int], list[bool]]]:
    stride = strategy.effective_stride
    if stride <= 0 or strategy.seconds <= 0:
        raise ValueError("window seconds and stride must be positive")
    t0 = min(record.timestamp for record in records)
    # Window i covers [t0 + i*stride, t0 + i*stride + seconds); a record may
    # land in several windows when stride < seconds.  Occupied windows only.
    by_window: dict[int, tuple[list[int], list[bool]]] = {}
    for record, key in zip(records, key_indices):
        offset = record.timestamp - t0
        i_max = offset // stride
        i_min = max(0, -((-(offset - strategy.seconds + 1)) // stride))  # ceil division
        for i in range(i_min, i_max + 1):
            if i not in by_window:
                by_window[i] = ([], [])
            keys, labels = by_window[i]
            keys.append(key)
            labels.append(record.is_anomalous)
    return [(f"win-{i:06d}", *by_window[i]) for i in sorted(by_window)]


def _split_chunks(
    sequence_id: str, keys: list[int], labels: list[bool], max_context: int
) -> list[LogKeySequence]:
    if max_context < 1:
        raise ValueError("max_context must be >= 1")
    if len(keys) <= max_context:
        return [LogKeySequence(sequence_id, tuple(keys), tuple(labels))]
    chunks = []
    for n, start in enumerate(range(0, len(keys), max_context)):
        stop = start + max_context
        chunks.append(
            LogKeySequence(
                f"{sequence_id}/{n}", tuple(keys[start:stop]), tuple(labels[start:stop])
            )
        )
    return chunks
