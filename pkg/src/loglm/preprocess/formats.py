"""Dataset line formats: header splitting, labels, and session extraction.

A :class:`FormatSpec` describes how one dataset lays out a raw log line:
which leading fields form the header, where the timestamp lives, how the
ground-truth label is encoded, and (for session-grouped datasets) how to
pull a session identifier out of the message content.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable

from loglm.errors import EmptyInput, MalformedLine

# Alert-tag convention used by the supercomputer logs and by our synthetic
# corpus: "-" marks a non-alert (normal) line, anything else is an alert.
def _dash_is_normal(label: str) -> bool:
    return label != "-"


def _never_anomalous(label: str) -> bool:
    return False


@dataclass(frozen=True)
class FormatSpec:
    """How to split one dataset's raw lines into (label, timestamp, content).

    ``header_pattern`` must define named groups ``timestamp`` and ``content``;
    a ``label`` group is optional (datasets without inline labels parse every
    line as normal).  ``session_pattern`` extracts a session identifier from
    the content and must be present exactly when the dataset is grouped by
    session.
    """

    name: str
    header_pattern: re.Pattern
    anomaly_rule: Callable[[str], bool] = _never_anomalous
    session_pattern: re.Pattern | None = None
    timestamp_format: str | None = None  # strptime format; None means epoch seconds

    def parse_timestamp(self, raw: str) -> int:
        if self.timestamp_format is None:
            return int(raw)
        dt = datetime.strptime(raw, self.timestamp_format)
        return int(dt.replace(tzinfo=timezone.utc).timestamp())


@dataclass(frozen=True)
class RawLogRecord:
    """One parsed log line with its header stripped."""

    timestamp: int
    content: str
    is_anomalous: bool
    session_id: str | None = None
    line_no: int = 0


def parse_log_line(line: str, spec: FormatSpec, line_no: int = 0) -> RawLogRecord:
    """Split one raw line per ``spec``.

    Raises :class:`MalformedLine` when the header pattern does not match,
    when the content is empty, or when the spec requires a session id and
    none can be extracted.
    """
    m = spec.header_pattern.match(line.rstrip("\n"))
    if m is None:
        raise MalformedLine(line_no, f"header pattern of format '{spec.name}' did not match")
    content = m.group("content").strip()
    if not content:
        raise MalformedLine(line_no, "empty content after header")
    groups = m.groupdict()
    label = groups.get("label", "")
    try:
        timestamp = spec.parse_timestamp(m.group("timestamp"))
    except ValueError as exc:
        raise MalformedLine(line_no, f"bad timestamp: {exc}") from None
    session_id = None
    if spec.session_pattern is not None:
        sm = spec.session_pattern.search(content)
        if sm is None:
            raise MalformedLine(line_no, "no session identifier in content")
        session_id = sm.group(0)
    return RawLogRecord(
        timestamp=timestamp,
        content=content,
        is_anomalous=spec.anomaly_rule(label or ""),
        session_id=session_id,
        line_no=line_no,
    )


@dataclass
class ParseStats:
    total_lines: int = 0
    parsed: int = 0
    malformed: int = 0
    malformed_examples: list[str] = field(default_factory=list)


def parse_lines(
    lines: Iterable[str], spec: FormatSpec, stats: ParseStats | None = None
) -> list[RawLogRecord]:
    """Parse raw lines, skipping and counting malformed ones.

    Blank lines are ignored.  Raises :class:`EmptyInput` if nothing parsed;
    malformed lines are never fatal on their own.
    """
    stats = stats if stats is not None else ParseStats()
    records: list[RawLogRecord] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        stats.total_lines += 1
        try:
            record = parse_log_line(line, spec, line_no)
        except MalformedLine as exc:
            stats.malformed += 1
            if len(stats.malformed_examples) < 5:
                stats.malformed_examples.append(str(exc))
            continue
        stats.parsed += 1
        records.append(record)
    if not records:
        raise EmptyInput(f"no line matched format '{spec.name}'")
    return records


# Built-in layouts for the public datasets this toolkit targets, plus the
# layout emitted by the synthetic generator.  Header field orders follow the
# published dataset conventions.

# BGL: ALERT EPOCH DATE NODE FULLTIME NODE TYPE COMPONENT LEVEL CONTENT
BGL = FormatSpec(
    name="bgl",
    header_pattern=re.compile(
        r"^(?P<label>\S+)\s+(?P<timestamp>\d+)\s+\S+\s+\S+\s+\S+\s+\S+\s+\S+\s+\S+\s+\S+\s+(?P<content>.*)$"
    ),
    anomaly_rule=_dash_is_normal,
)

# Thunderbird: ALERT EPOCH DATE USER MONTH DAY TIME LOCATION CONTENT
THUNDERBIRD = FormatSpec(
    name="thunderbird",
    header_pattern=re.compile(
        r"^(?P<label>\S+)\s+(?P<timestamp>\d+)\s+\S+\s+\S+\s+\S+\s+\S+\s+\S+\s+\S+\s+(?P<content>.*)$"
    ),
    anomaly_rule=_dash_is_normal,
)

# HDFS: DATE TIME PID LEVEL COMPONENT: CONTENT.  Lines carry no inline label;
# sequences are grouped by the block id embedded in the content.
HDFS = FormatSpec(
    name="hdfs",
    header_pattern=re.compile(
        r"^(?P<timestamp>\d{6} \d{6})\s+\d+\s+\S+\s+\S+\s+(?P<content>.*)$"
    ),
    session_pattern=re.compile(r"blk_-?\d+"),
    timestamp_format="%y%m%d %H%M%S",
)

# Synthetic generator output: ALERT EPOCH NODE CONTENT, session token in content.
SYNTH_SESSION = FormatSpec(
    name="synth-session",
    header_pattern=re.compile(r"^(?P<label>\S+)\s+(?P<timestamp>\d+)\s+\S+\s+(?P<content>.*)$"),
    anomaly_rule=_dash_is_normal,
    session_pattern=re.compile(r"sess-\d+"),
)

SYNTH_WINDOW = FormatSpec(
    name="synth-window",
    header_pattern=re.compile(r"^(?P<label>\S+)\s+(?P<timestamp>\d+)\s+\S+\s+(?P<content>.*)$"),
    anomaly_rule=_dash_is_normal,
)

BUILTIN_FORMATS: dict[str, FormatSpec] = {
    spec.name: spec for spec in (BGL, THUNDERBIRD, HDFS, SYNTH_SESSION, SYNTH_WINDOW)
}


def get_format(name: str) -> FormatSpec:
    try:
        return BUILTIN_FORMATS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_FORMATS))
        raise KeyError(f"unknown log format '{name}' (known: {known})") from None
