"""Pure numpy versions of the compiled kernels (same signatures)."""

from __future__ import annotations

import numpy as np


def absorb_round_robin(s: np.ndarray, means: np.ndarray, noise: np.ndarray, offset: int) -> None:
    """Add rewards ``means[j] + noise[k]`` into ``s[j]`` for ``j = (offset + k) mod d``."""
    d = s.shape[0]
    n = noise.shape[0]
    if n == 0:
        return
    idx = (offset + np.arange(n)) % d
    # unbuffered, in order: the same floating-point sums as a sequential loop
    np.add.at(s, idx, means[idx] + noise)


def round_robin_sums(noise: np.ndarray, d: int) -> np.ndarray:
    """Per-coordinate sums of each row of ``noise`` under round-robin assignment."""
    m, n = noise.shape
    full = (n // d) * d
    out = noise[:, :full].reshape(m, n // d, d).sum(axis=1)
    if full < n:
        out[:, : n - full] += noise[:, full:]
    return out
