"""Top-K candidate selection over next-key distributions.

Shared by the reward system (candidate sets, truncated sampling) and the
detector (Top-K membership).  Candidate sets are deterministic: ties break
toward the lower key index, which also makes the sets nested in K.
"""

from __future__ import annotations

import math

import numpy as np

from loglm.errors import InvalidK, KOutOfRange


def resolve_k(k: int | float, key_count: int) -> int:
    """Resolve an int or fraction-of-keys K to a candidate-list size.

    Fractions in (0, 1] resolve to ``ceil(k * key_count)``; integers are
    used as-is.  Either way the result is clamped to [1, key_count].
    """
    if key_count < 1:
        raise InvalidK(f"key_count must be >= 1, got {key_count}")
    if isinstance(k, bool):
        raise InvalidK("K must be an int or a float fraction")
    if isinstance(k, int):
        if k < 1:
            raise InvalidK(f"integer K must be >= 1, got {k}")
        resolved = k
    elif isinstance(k, float):
        if not 0.0 < k <= 1.0:
            raise InvalidK(f"fractional K must be in (0, 1], got {k}")
        resolved = math.ceil(k * key_count)
    else:
        raise InvalidK(f"K must be an int or a float fraction, got {type(k).__name__}")
    return min(max(resolved, 1), key_count)


def top_k_candidates(dist: np.ndarray, k: int, key_count: int) -> np.ndarray:
    """The k keys with highest probability, ties broken by lower index.

    ``dist`` is a probability vector over the full vocabulary; only the
    first ``key_count`` entries (the log keys) are eligible.  Returns key
    indices in rank order.
    """
    if not 1 <= k <= key_count:
        raise KOutOfRange(f"k={k} outside [1, {key_count}]")
    ranked = np.argsort(-dist[:key_count], kind="stable")
    return ranked[:k]


def truncate_distribution(dist: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Zero probabilities outside the candidate set and renormalize."""
    truncated = np.zeros_like(dist)
    truncated[candidates] = dist[candidates]
    total = truncated.sum()
    if total <= 0.0:
        # Degenerate distribution: fall back to uniform over the candidates.
        truncated[candidates] = 1.0 / len(candidates)
        return truncated
    return truncated / total
