"""Paired-play wrapper running an ETC-type policy on a translated action set.

Each inner round becomes two outer rounds: the center ``c`` and then
``c + x_inner``. The inner policy sees ``y_2t - y_2t-1 = theta^T x_inner +
(z_2t - z_2t-1)``, a valid observation with variance proxy ``2 sigma^2``.
"""

from __future__ import annotations

import math

import numpy as np

from .ellipsoid import EllipsoidSet
from .explore_commit import DEFAULT_ALPHA, E2tcPolicy
from .errors import ContractViolation


class ReducedPolicy:
    """Outer policy on ``c + X`` driven by ``inner``, an ETC-type policy on ``X``.

    ``inner`` must expose ``next_action``, ``observe``, ``is_committed`` and
    ``commit_x``, and should be tuned for ``2 sigma^2`` and horizon ``T // 2``.
    """

    def __init__(self, inner, c, T: int):
        self.inner = inner
        self.c = np.asarray(c, dtype=float).copy()
        self.T = int(T)
        self.t = 0
        self.pending: float | None = None
        self.inner_rounds = 0

    @property
    def committed_x(self) -> np.ndarray | None:
        if self.inner.is_committed():
            return self.c + self.inner.commit_x
        return None

    def is_committed(self) -> bool:
        return self.inner.is_committed()

    def _inner_exhausted(self) -> bool:
        return self.inner.t >= self.inner.T

    def next_action(self) -> np.ndarray:
        if self.t >= self.T:
            raise ContractViolation("horizon exhausted")
        if self.inner.is_committed():
            return self.c + self.inner.commit_x
        if self.pending is None or self._inner_exhausted():
            return self.c.copy()
        return self.c + self.inner.next_action()

    def observe(self, y: float) -> None:
        if self.t >= self.T:
            raise ContractViolation("horizon exhausted")
        self.t += 1
        if self.inner.is_committed() or self._inner_exhausted():
            return
        if self.pending is None:
            self.pending = y
            return
        self.inner.observe(y - self.pending)
        self.pending = None
        self.inner_rounds += 1

    def info(self) -> dict:
        out = dict(self.inner.info()) if hasattr(self.inner, "info") else {}
        out["inner_rounds"] = self.inner_rounds
        commit = out.get("commit_time")
        out["outer_commit_time"] = None if commit is None else 2 * commit
        return out


def reduced_e2tc(E: EllipsoidSet, sigma: float, T: int, alpha: float = DEFAULT_ALPHA) -> ReducedPolicy:
    """E2TC on ``E`` (any center) through the paired-play reduction."""
    inner_T = T // 2
    if inner_T < 1:
        raise ContractViolation("reduction needs T >= 2")
    inner = E2tcPolicy(E.centered(), math.sqrt(2.0) * sigma, inner_T, alpha=alpha)
    return ReducedPolicy(inner, E.c, T)
