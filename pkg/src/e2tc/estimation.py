"""Least squares under the round-robin design and its confidence width."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .ellipsoid import EllipsoidSet
from .environment import NoiseModel
from .errors import ContractViolation, IncompleteDesign, SingularDesign

SINGULAR_COND = 1e12


class RoundRobinAccumulator:
    """Per-coordinate reward sums for plays of the factor columns ``S e_j``.

    Under the round-robin design the least-squares estimate only needs these
    ``d`` sums, never the design matrix itself.
    """

    def __init__(self, d: int):
        if d < 1:
            raise ContractViolation("dimension must be >= 1")
        self.d = d
        self.s = np.zeros(d)
        self.counts = np.zeros(d, dtype=np.int64)
        self.n = 0

    def reset(self) -> None:
        self.s[:] = 0.0
        self.counts[:] = 0
        self.n = 0

    @property
    def next_index(self) -> int:
        """0-based column to be played next."""
        return self.n % self.d

    @property
    def complete(self) -> bool:
        return self.n >= self.d and self.n % self.d == 0

    def absorb(self, j: int, y: float) -> None:
        """Record reward ``y`` for column ``j`` (0-based); must follow the cycle."""
        if j != self.n % self.d:
            raise ContractViolation(f"expected column {self.n % self.d}, got {j}")
        self.s[j] += y
        self.counts[j] += 1
        self.n += 1

    def absorb_stream(self, means: np.ndarray, noise: np.ndarray) -> None:
        """Absorb ``len(noise)`` consecutive round-robin rewards ``means[j] + z``."""
        n = noise.shape[0]
        if n == 0:
            return
        offset = self.n % self.d
        kernels.absorb_round_robin(self.s, means, noise, offset)
        full, rem = divmod(n, self.d)
        self.counts += full
        if rem:
            idx = (offset + np.arange(rem)) % self.d
            self.counts[idx] += 1
        self.n += n


@dataclass(frozen=True)
class LsEstimate:
    theta_hat: np.ndarray
    n_used: int
    anorm: float


def ls_from_accumulator(acc: RoundRobinAccumulator, E: EllipsoidSet) -> LsEstimate:
    """``theta_hat = (d/n) S^-T s`` and ``||theta_hat||_A = (d/n) ||s||_2``."""
    if acc.d != E.d:
        raise ContractViolation("accumulator and action set dimensions differ")
    if not acc.complete:
        raise IncompleteDesign(f"{acc.n} rounds is not a positive multiple of d = {acc.d}")
    scale = acc.d / acc.n
    theta_hat = scale * (E.S_inv_t @ acc.s)
    return LsEstimate(theta_hat=theta_hat, n_used=acc.n, anorm=scale * float(np.linalg.norm(acc.s)))


def ls_generic(X, Y) -> np.ndarray:
    """Ordinary least squares ``(X^T X)^-1 X^T Y`` via QR of ``X``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or Y.shape != (X.shape[0],):
        raise ContractViolation(f"shape mismatch: X {X.shape}, Y {Y.shape}")
    n, d = X.shape
    if n < d:
        raise SingularDesign(f"{n} rows cannot identify {d} coefficients")
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.min() == 0.0 or np.linalg.cond(R) > SINGULAR_COND:
        raise SingularDesign("design matrix is rank deficient")
    return np.linalg.solve(R, Q.T @ Y)


def confidence_width(delta: float, n: int, sigma: float, d: int) -> float:
    """Width ``U(delta, n)`` with
    ``U^2 = (sigma^2 d^2 / n) (1 + 2 sqrt(L/d) + 2 L/d)``, ``L = log(1/delta)``.
    """
    if not 0.0 < delta <= 1.0:
        raise ContractViolation(f"delta must lie in (0, 1], got {delta}")
    if n < 1 or d < 1 or sigma < 0:
        raise ContractViolation("need n >= 1, d >= 1, sigma >= 0")
    L = max(-math.log(delta), 0.0)
    u2 = sigma * sigma * d * d / n * (1.0 + 2.0 * math.sqrt(L / d) + 2.0 * L / d)
    return math.sqrt(u2)


def concentration_statistic(
    d: int,
    n: int,
    sigma: float,
    trials: int,
    rng: np.random.Generator,
    E: EllipsoidSet | None = None,
    noise: NoiseModel | None = None,
) -> np.ndarray:
    """Samples of ``||theta_hat - theta||^2_{X^T X}`` after ``n`` round-robin plays.

    The statistic does not depend on theta, so the estimation error is formed
    directly from the noise sums.
    """
    if n < d or n % d:
        raise IncompleteDesign("n must be a positive multiple of d")
    E = EllipsoidSet.ball(d) if E is None else E
    noise = NoiseModel("gaussian", sigma) if noise is None else noise
    z = noise.sample(rng, size=(trials, n))
    sums = kernels.round_robin_sums(np.ascontiguousarray(z), d)
    err = (d / n) * sums @ E.S_inv_t.T  # theta_hat - theta, one row per trial
    # ||err||^2_{X^T X} with X^T X = (n/d) A
    return (n / d) * np.einsum("ij,jk,ik->i", err, E.A, err)


def concentration_threshold(d: int, sigma: float, x: float) -> float:
    return sigma * sigma * (d + 2.0 * math.sqrt(d * x) + 2.0 * x)


def concentration_tail_estimate(
    d: int, n: int, sigma: float, x: float, trials: int, rng: np.random.Generator, **kwargs
) -> float:
    """Empirical ``P[||theta_hat - theta||^2_{X^T X} >= sigma^2 (d + 2 sqrt(dx) + 2x)]``."""
    if x < 0:
        raise ContractViolation("x must be >= 0")
    if sigma == 0:
        return 0.0
    stat = concentration_statistic(d, n, sigma, trials, rng, **kwargs)
    return float(np.mean(stat >= concentration_threshold(d, sigma, x)))
