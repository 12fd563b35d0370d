"""Model vocabulary over mined log keys plus special tokens.

Token ids 0..n-1 are the log keys observed in the training split; the
specials PAD, BOS, UNK occupy the fixed indices n, n+1, n+2.  Catalog keys
never seen in training encode to UNK.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SPECIALS = ("PAD", "BOS", "UNK")


@dataclass(frozen=True)
class Vocabulary:
    keys: tuple[int, ...]  # catalog key ids in token order

    def __post_init__(self) -> None:
        if len(set(self.keys)) != len(self.keys):
            raise ValueError("vocabulary keys must be distinct")
        if not self.keys:
            raise ValueError("vocabulary needs at least one key")

    @property
    def key_count(self) -> int:
        return len(self.keys)

    @property
    def pad(self) -> int:
        return self.key_count

    @property
    def bos(self) -> int:
        return self.key_count + 1

    @property
    def unk(self) -> int:
        return self.key_count + 2

    @property
    def vocab_size(self) -> int:
        return self.key_count + len(SPECIALS)

    def encode(self, catalog_keys: Sequence[int]) -> np.ndarray:
        """Map catalog key ids to token ids; unknown keys become UNK."""
        table = self._token_of()
        return np.array([table.get(k, self.unk) for k in catalog_keys], dtype=np.int64)

    def _token_of(self) -> dict[int, int]:
        cached = getattr(self, "_token_cache", None)
        if cached is None:
            cached = {key: token for token, key in enumerate(self.keys)}
            object.__setattr__(self, "_token_cache", cached)
        return cached

    @classmethod
    def from_key_sets(cls, observed: Iterable[int]) -> "Vocabulary":
        """Canonical vocabulary: distinct catalog keys in sorted order."""
        return cls(keys=tuple(sorted(set(observed))))

    @classmethod
    def identity(cls, key_count: int) -> "Vocabulary":
        """Token ids equal to catalog key ids 0..key_count-1."""
        return cls(keys=tuple(range(key_count)))
