"""Raw log lines -> labeled log-key sequences."""

from __future__ import annotations

from typing import Sequence

from loglm.preprocess.drain import WILDCARD, DrainTree, LogTemplate
from loglm.preprocess.formats import (
    BUILTIN_FORMATS,
    FormatSpec,
    ParseStats,
    RawLogRecord,
    get_format,
    parse_log_line,
    parse_lines,
)
from loglm.preprocess.keys import KeyRegistry, LogKey
from loglm.preprocess.sequences import (
    GroupStrategy,
    LogKeySequence,
    SessionStrategy,
    WindowStrategy,
    group_sequences,
)


def mine_corpus(
    records: Sequence[RawLogRecord],
    depth: int = 4,
    similarity_threshold: float = 0.4,
    max_children: int = 100,
) -> tuple[DrainTree, KeyRegistry, list[int]]:
    """Mine templates over all records and assign dense key indices.

    Returns the (now frozen) tree, the key registry, and the per-record key
    index, parallel to ``records``.
    """
    tree = DrainTree(depth=depth, similarity_threshold=similarity_threshold, max_children=max_children)
    registry = KeyRegistry()
    key_indices = []
    for record in records:
        template = tree.insert(record.content)
        key_indices.append(registry.register(template).key_index)
    return tree, registry, key_indices


__all__ = [
    "BUILTIN_FORMATS",
    "DrainTree",
    "FormatSpec",
    "GroupStrategy",
    "KeyRegistry",
    "LogKey",
    "LogKeySequence",
    "LogTemplate",
    "ParseStats",
    "RawLogRecord",
    "SessionStrategy",
    "WILDCARD",
    "WindowStrategy",
    "get_format",
    "group_sequences",
    "mine_corpus",
    "parse_lines",
    "parse_log_line",
]
