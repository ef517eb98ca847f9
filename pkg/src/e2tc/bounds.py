"""Closed-form regret and warm-up bounds used by the bound reports."""

from __future__ import annotations

import math

from .errors import ContractViolation


def logbar(x: float) -> float:
    """``1 + log(max(x, 1))``."""
    return 1.0 + math.log(max(x, 1.0))


def _neg_part_exp(x: float) -> float:
    """``exp(min(x, 0))``."""
    return math.exp(min(x, 0.0))


def theorem3_rhs(d: int, sigma: float, T: float, norm_A_theta: float) -> float:
    """Regret bound of E2TC (alpha = 3) on a centered ellipsoid.

    For ``sigma = 0`` the run is two round-robin blocks then an exact commit,
    so the bound is ``2 ||theta||_A (d + d)``.
    """
    if not norm_A_theta > 0:
        raise ContractViolation("norm must be positive")
    if sigma < 0:
        raise ContractViolation("sigma must be >= 0")
    b = norm_A_theta
    if sigma == 0:
        return 4.0 * d * b
    rt = math.sqrt(T)
    return (
        6.0 * d * sigma * rt
        + 984.0 * sigma**2 * d**2 / b * logbar(T * b**2 / (sigma**2 * d**2))
        + 290.0 * d * b
        + 2.0 * T * b * _neg_part_exp(2.0 * d / 3.0 - (2.0 / 9.0) * rt * b / sigma)
    )


def theorem4_rhs(d: int, sigma: float, T: float, norm_A_theta: float) -> float:
    """Regret bound of E2TC through the paired-play reduction (any center)."""
    if not norm_A_theta > 0:
        raise ContractViolation("norm must be positive")
    if sigma < 0:
        raise ContractViolation("sigma must be >= 0")
    b = norm_A_theta
    if sigma == 0:
        # two noiseless inner blocks, each costing two outer rounds
        return 8.0 * d * b
    rt = math.sqrt(T)
    return (
        7.0 * d * sigma * rt
        + 2622.0 * sigma**2 * d**2 / b * logbar(T * b**2 / (4.0 * sigma**2 * d**2))
        + 2.0 * T * b * _neg_part_exp(2.0 * d / 3.0 - (1.0 / 9.0) * rt * b / sigma)
        + 392.0 * d * b
    )


def lemma3_failure_rhs(d: int, sigma: float, T: float, norm_A_theta: float) -> float:
    """Bound on ``P[B_hat outside [||theta||_A / 2, 3 ||theta||_A / 2]]``."""
    b2 = norm_A_theta**2
    if sigma == 0:
        return 48.0 * d / T
    return 164.0 * sigma**2 * d**2 / (T * b2) * logbar(T * b2 / (d**2 * sigma**2)) + 48.0 * d / T


def lemma3_warmup_rhs(d: int, sigma: float, T: float, norm_A_theta: float) -> float:
    """Bound on the expected warm-up length."""
    b2 = norm_A_theta**2
    if sigma == 0:
        return 48.0 * d
    return 164.0 * sigma**2 * d**2 / b2 * logbar(T * b2 / (sigma**2 * d**2)) + 48.0 * d


def lower_bound_floor(d: int, sigma: float, T: float, B: float) -> float:
    """``min(sigma d sqrt(T) / 16, B T / 4)``."""
    return min(sigma * d * math.sqrt(T) / 16.0, B * T / 4.0)


def binomial_std(p: float, n: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / n)
