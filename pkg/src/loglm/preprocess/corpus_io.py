"""Versioned on-disk formats for the parsed corpus and the template catalog.

Both files are line-delimited JSON.  The first line is a header record
carrying the format name and version; the remaining lines are one record
per sequence (corpus) or per key (catalog).  Writes are deterministic:
keys are sorted and floats never appear.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from loglm.errors import LoglmError
from loglm.preprocess.keys import KeyRegistry
from loglm.preprocess.sequences import LogKeySequence

CORPUS_FORMAT = "loglm-corpus"
CATALOG_FORMAT = "loglm-templates"
FORMAT_VERSION = 1


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_corpus(path: str | Path, sequences: list[LogKeySequence], key_count: int) -> None:
    header = {
        "format": CORPUS_FORMAT,
        "version": FORMAT_VERSION,
        "key_count": key_count,
        "sequence_count": len(sequences),
    }
    lines = [_dump(header)]
    for seq in sequences:
        lines.append(
            _dump(
                {
                    "id": seq.sequence_id,
                    "keys": list(seq.keys),
                    "labels": [int(b) for b in seq.labels],
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_corpus(path: str | Path) -> tuple[list[LogKeySequence], int]:
    """Returns the sequences and the catalog key count they index into."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise LoglmError(f"{path}: empty corpus file")
    header = json.loads(lines[0])
    if header.get("format") != CORPUS_FORMAT:
        raise LoglmError(f"{path}: not a {CORPUS_FORMAT} file")
    if header.get("version") != FORMAT_VERSION:
        raise LoglmError(f"{path}: unsupported corpus version {header.get('version')}")
    sequences = []
    for line in lines[1:]:
        row = json.loads(line)
        sequences.append(
            LogKeySequence(
                sequence_id=row["id"],
                keys=tuple(row["keys"]),
                labels=tuple(bool(b) for b in row["labels"]),
            )
        )
    return sequences, int(header["key_count"])


def write_catalog(path: str | Path, registry: KeyRegistry) -> None:
    header = {"format": CATALOG_FORMAT, "version": FORMAT_VERSION, "count": len(registry)}
    lines = [_dump(header)]
    for index, template in enumerate(registry.templates):
        lines.append(
            _dump(
                {
                    "key": index,
                    "template_id": template.template_id,
                    "template": template.text,
                    "matches": template.match_count,
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class CatalogEntry:
    key: int
    template_id: str
    template: str
    matches: int


def read_catalog(path: str | Path) -> list[CatalogEntry]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise LoglmError(f"{path}: empty catalog file")
    header = json.loads(lines[0])
    if header.get("format") != CATALOG_FORMAT:
        raise LoglmError(f"{path}: not a {CATALOG_FORMAT} file")
    if header.get("version") != FORMAT_VERSION:
        raise LoglmError(f"{path}: unsupported catalog version {header.get('version')}")
    entries = []
    for line in lines[1:]:
        row = json.loads(line)
        entries.append(
            CatalogEntry(
                key=int(row["key"]),
                template_id=row["template_id"],
                template=row["template"],
                matches=int(row["matches"]),
            )
        )
    return entries


__all__ = [
    "CatalogEntry",
    "read_catalog",
    "read_corpus",
    "write_catalog",
    "write_corpus",
]
