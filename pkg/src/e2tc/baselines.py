"""Comparison policies: oracle, uniform, oracle-norm ETC and OFUL on the unit ball."""

from __future__ import annotations

import math

import numpy as np

from .ellipsoid import EllipsoidSet, optimal_action
from .explore_commit import E2tcPolicy
from .errors import ContractViolation, UnsupportedActionSet

BISECT_MAX_ITER = 200
BISECT_RTOL = 1e-12


class OraclePolicy:
    """Plays ``x*(theta)`` every round (zero regret reference)."""

    def __init__(self, E: EllipsoidSet, theta):
        theta = np.asarray(theta, dtype=float)
        self._x = optimal_action(E, theta) if np.any(theta) else E.c.copy()

    def next_action(self) -> np.ndarray:
        return self._x.copy()

    def observe(self, y: float) -> None:
        pass


class UniformPolicy:
    """Uniform direction ``c + S u / ||u||`` with ``u`` standard Gaussian."""

    def __init__(self, E: EllipsoidSet, rng: np.random.Generator):
        self.E = E
        self.rng = rng

    def next_action(self) -> np.ndarray:
        u = self.rng.standard_normal(self.E.d)
        return self.E.c + self.E.S @ (u / np.linalg.norm(u))

    def observe(self, y: float) -> None:
        pass


def oracle_etc_policy(norm_A_theta: float, sigma: float, T: int, E: EllipsoidSet) -> E2tcPolicy:
    """E2TC with the warm-up replaced by the true ``||theta||_A``.

    The budget is floored at one block so the noiseless case still gets an
    estimate.
    """
    if not norm_A_theta > 0:
        raise ContractViolation("norm must be positive")
    return E2tcPolicy(E, sigma, T, known_norm=norm_A_theta)


def max_norm_over_confidence(theta_hat, V, beta: float) -> tuple[np.ndarray, float]:
    """Maximize ``||theta||_2`` over ``{theta : ||theta - theta_hat||_V <= beta}``.

    Writing ``theta = theta_hat + p``, a global maximizer satisfies
    ``(mu V - I) p = theta_hat`` with ``mu >= 1 / lambda_min(V)`` and
    ``p^T V p = beta^2``. In the eigenbasis of ``V`` this is a scalar secular
    equation in ``mu``, solved by bisection. When ``theta_hat`` has no weight on
    the softest eigenspace and the secular function stays below ``beta^2`` at
    the pole, ``mu`` sits at the pole and the remaining budget is spent along
    the softest eigenvector.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    V = np.asarray(V, dtype=float)
    if beta < 0:
        raise ContractViolation("beta must be >= 0")
    d = theta_hat.shape[0]
    if V.shape != (d, d):
        raise ContractViolation("dimension mismatch")
    if beta == 0:
        return theta_hat.copy(), float(np.linalg.norm(theta_hat))
    v, Q = np.linalg.eigh(0.5 * (V + V.T))
    if v[0] <= 0:
        raise ContractViolation("V must be positive definite")
    a = Q.T @ theta_hat
    v_min = v[0]
    soft = v <= v_min * (1.0 + 1e-10)
    a_scale = max(np.linalg.norm(a), 1.0)
    soft_weight = np.linalg.norm(a[soft])
    w = v * a * a
    beta2 = beta * beta

    def phi(mu: float) -> float:
        return float(np.sum(w / (mu * v - 1.0) ** 2)) - beta2

    hard = soft_weight <= 1e-14 * a_scale
    if hard:
        # secular function at the pole, ignoring the (empty) soft components
        rest = ~soft
        at_pole = float(np.sum(w[rest] / (v[rest] / v_min - 1.0) ** 2)) if rest.any() else 0.0
        hard = at_pole <= beta2
    if hard:
        r = np.zeros(d)
        rest = ~soft
        r[rest] = a[rest] / (v[rest] / v_min - 1.0)
        fill = max(beta2 - float(np.sum(v[rest] * r[rest] ** 2)), 0.0)
        k = int(np.flatnonzero(soft)[0])
        # deterministic sign: largest-magnitude entry of the soft eigenvector positive
        q = Q[:, k]
        sign = 1.0 if q[np.argmax(np.abs(q))] >= 0 else -1.0
        r[k] = sign * math.sqrt(fill / v_min)
        p = Q @ r
    else:
        lo = 1.0 / v_min
        hi = (1.0 + math.sqrt(float(np.sum(w))) / beta) / v_min
        while phi(hi) > 0:
            hi *= 2.0
        for _ in range(BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if phi(mid) > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= BISECT_RTOL * hi:
                break
        mu = hi
        p = Q @ (a / (mu * v - 1.0))
    # land exactly on the boundary
    pv = math.sqrt(max(float(p @ V @ p), 0.0))
    if pv > 0:
        p *= beta / pv
    theta_star = theta_hat + p
    return theta_star, float(np.linalg.norm(theta_star))


class OfulBallPolicy:
    """Optimistic policy specialized to the unit ball.

    On the ball ``max_x x^T theta = ||theta||_2``, so the optimistic step
    reduces to :func:`max_norm_over_confidence` and the action is the unit
    vector along the maximizer. The radius is
    ``sigma sqrt(d log((1 + t/lambda) / delta)) + sqrt(lambda) S``.
    """

    def __init__(
        self,
        E: EllipsoidSet,
        sigma: float,
        T: int,
        S_bound: float = 25.0,
        lam: float = 1.0,
        delta: float | None = None,
    ):
        d = E.d
        if not (E.is_centered and np.allclose(E.A, np.eye(d), rtol=0, atol=1e-12)):
            raise UnsupportedActionSet("OFUL baseline is only implemented for the unit ball")
        if not lam > 0:
            raise ContractViolation("ridge parameter must be positive")
        self.d = d
        self.sigma = float(sigma)
        self.S_bound = float(S_bound)
        self.lam = float(lam)
        self.delta = 1.0 / T if delta is None else float(delta)
        self.V = lam * np.eye(d)
        self.b = np.zeros(d)
        self.t = 0
        self._last: np.ndarray | None = None

    def radius(self) -> float:
        return self.sigma * math.sqrt(self.d * math.log((1.0 + self.t / self.lam) / self.delta)) + math.sqrt(
            self.lam
        ) * self.S_bound

    def theta_hat(self) -> np.ndarray:
        return np.linalg.solve(self.V, self.b)

    def next_action(self) -> np.ndarray:
        theta_star, value = max_norm_over_confidence(self.theta_hat(), self.V, self.radius())
        if value == 0.0:
            x = np.zeros(self.d)
            x[self.t % self.d] = 1.0
        else:
            x = theta_star / value
        self._last = x
        return x.copy()

    def observe(self, y: float) -> None:
        x = self._last
        self.V += np.outer(x, x)
        self.b += y * x
        self.t += 1
