"""Explore-explore-then-commit policy for centered ellipsoids.

Phase 1 (warm-up) plays the factor columns round-robin in windows of
``d, 2d, 4d, ...`` rounds and stops once the least-squares norm estimate of a
window clears ``alpha * U(delta_i, n_i)``. Phase 2 explores for
``N_e = d sigma ceil(sqrt(T) / B_hat)`` rounds, and phase 3 plays the greedy
action for the phase-2 estimate until the horizon.

Two interchangeable drivers are provided: :class:`E2tcPolicy`, a step/observe
state machine usable with any episode runner, and :func:`simulate_e2tc`, which
plays a whole episode segment by segment through the round-robin kernel.
"""

from __future__ import annotations

import enum
import math
import time

import numpy as np

from .ellipsoid import EllipsoidSet, optimal_action
from .environment import BanditInstance, RegretTrace, checkpoints, optimal_value
from .errors import ContractViolation
from .estimation import RoundRobinAccumulator, confidence_width, ls_from_accumulator

DEFAULT_ALPHA = 3.0
NOISE_CHUNK = 4096


class Phase(str, enum.Enum):
    WARMUP = "warmup"
    EXPLORE = "explore"
    COMMIT = "commit"


def schedule(i: int, d: int, T: int) -> tuple[int, int, float]:
    """``(n_i, T_i, delta_i)`` for warm-up window ``i >= 1``.

    Window ``i`` holds ``n_i = d 2^(i-1)`` rounds and ends at ``T_i = d (2^i - 1)``.
    """
    if i < 1:
        raise ContractViolation("window index starts at 1")
    n_i = d * (1 << (i - 1))
    T_i = d * ((1 << i) - 1)
    return n_i, T_i, min(d * n_i / T, 1.0)


def exploration_budget(B_hat: float, sigma: float, d: int, T: int) -> int:
    """``N_e = d sigma ceil(sqrt(T) / B_hat)`` rounded up to a multiple of ``d``, at least ``d``."""
    if not B_hat > 0:
        raise ContractViolation(f"norm estimate must be positive, got {B_hat}")
    per_coord = math.ceil(sigma * math.ceil(math.sqrt(T) / B_hat))
    return d * max(per_coord, 1)


def warmup_threshold(alpha: float, i: int, d: int, T: int, sigma: float) -> float:
    n_i, _, delta_i = schedule(i, d, T)
    return alpha * confidence_width(delta_i, n_i, sigma, d)


class E2tcPolicy:
    """Step/observe state machine for one episode on a centered ellipsoid.

    With ``known_norm`` the warm-up is skipped and the budget is sized from the
    true ``||theta||_A`` (oracle ablation).
    """

    def __init__(
        self,
        E: EllipsoidSet,
        sigma: float,
        T: int,
        alpha: float = DEFAULT_ALPHA,
        known_norm: float | None = None,
    ):
        if not E.is_centered:
            raise ContractViolation("E2TC needs a centered action set; wrap it in ReducedPolicy")
        if T < 1 or not alpha > 0 or sigma < 0:
            raise ContractViolation("need T >= 1, alpha > 0, sigma >= 0")
        self.E = E
        self.sigma = float(sigma)
        self.T = int(T)
        self.alpha = float(alpha)
        self.t = 0
        self.acc = RoundRobinAccumulator(E.d)
        self.window = 1
        self.B_hat: float | None = None
        self.N_e: int | None = None
        self.iota_hat: int | None = None
        self.warmup_length = 0
        self.theta_hat: np.ndarray | None = None
        self.commit_x: np.ndarray | None = None
        self.commit_time: int | None = None
        self.phase = Phase.WARMUP
        if known_norm is not None:
            if not known_norm > 0:
                raise ContractViolation("known norm must be positive")
            self._enter_explore(float(known_norm))

    def _enter_explore(self, B_hat: float) -> None:
        self.B_hat = B_hat
        self.N_e = exploration_budget(B_hat, self.sigma, self.E.d, self.T)
        self.warmup_length = self.t
        self.acc.reset()
        self.phase = Phase.EXPLORE

    def is_committed(self) -> bool:
        return self.phase is Phase.COMMIT

    def next_action(self) -> np.ndarray:
        if self.t >= self.T:
            raise ContractViolation("horizon exhausted")
        if self.phase is Phase.COMMIT:
            return self.commit_x.copy()
        return self.E.S[:, self.acc.next_index].copy()

    def observe(self, y: float) -> None:
        if self.t >= self.T:
            raise ContractViolation("horizon exhausted")
        self.t += 1
        if self.phase is Phase.COMMIT:
            return
        self.acc.absorb(self.acc.next_index, y)
        if self.phase is Phase.WARMUP:
            n_i, _, _ = schedule(self.window, self.E.d, self.T)
            if self.acc.n < n_i:
                return
            est = ls_from_accumulator(self.acc, self.E)
            if est.anorm > warmup_threshold(self.alpha, self.window, self.E.d, self.T, self.sigma):
                self.iota_hat = self.window
                self._enter_explore(est.anorm)
            else:
                self.window += 1
                self.acc.reset()
        elif self.acc.n == self.N_e:
            self.theta_hat = ls_from_accumulator(self.acc, self.E).theta_hat
            self.commit_x = optimal_action(self.E, self.theta_hat)
            self.commit_time = self.t
            self.phase = Phase.COMMIT

    def info(self) -> dict:
        warmup = self.warmup_length if self.B_hat is not None else self.t
        return {
            "phase": self.phase.value,
            "iota_hat": self.iota_hat,
            "B_hat": self.B_hat,
            "N_e": self.N_e,
            "warmup_length": warmup,
            "commit_time": self.commit_time,
            "committed": self.is_committed(),
        }


class _SegmentRecorder:
    """Cumulative regret at checkpoints for runs of round-robin or constant plays."""

    def __init__(self, T: int, gaps: np.ndarray):
        self.steps = checkpoints(T)
        self.values = np.empty(self.steps.shape[0])
        self.k = 0
        self.t = 0
        self.cum = 0.0
        self.d = gaps.shape[0]
        self.cycle = float(gaps.sum())
        self._prefix = np.concatenate([[0.0], np.cumsum(np.concatenate([gaps, gaps]))])

    def _rr_sum(self, offset: int, m: int) -> float:
        q, r = divmod(m, self.d)
        return q * self.cycle + (self._prefix[offset + r] - self._prefix[offset])

    def round_robin(self, n: int, offset: int) -> None:
        end = self.t + n
        while self.k < self.steps.shape[0] and self.steps[self.k] <= end:
            self.values[self.k] = self.cum + self._rr_sum(offset, int(self.steps[self.k]) - self.t)
            self.k += 1
        self.cum += self._rr_sum(offset, n)
        self.t = end

    def constant(self, n: int, gap: float) -> None:
        end = self.t + n
        while self.k < self.steps.shape[0] and self.steps[self.k] <= end:
            self.values[self.k] = self.cum + (int(self.steps[self.k]) - self.t) * gap
            self.k += 1
        self.cum += n * gap
        self.t = end


def simulate_e2tc(
    E: EllipsoidSet,
    inst: BanditInstance,
    T: int,
    rng: np.random.Generator,
    alpha: float = DEFAULT_ALPHA,
    sigma: float | None = None,
    known_norm: float | None = None,
    chunk: int = NOISE_CHUNK,
) -> RegretTrace:
    """Whole E2TC episode without per-step Python dispatch.

    Rewards are drawn in bounded chunks, so memory stays ``O(d^2 + chunk)``
    whatever the horizon. The noise values feeding the estimates, and hence
    every decision, match :class:`E2tcPolicy` run through ``run_episode`` on
    the same generator. No noise is drawn during the commit phase, since it
    cannot affect the policy.
    """
    if not E.is_centered:
        raise ContractViolation("E2TC needs a centered action set")
    if T < 1 or not alpha > 0:
        raise ContractViolation("need T >= 1 and alpha > 0")
    sigma = inst.noise.sigma if sigma is None else float(sigma)
    d = E.d
    theta = inst.theta
    # same contiguous-column dot as the step-by-step path, for identical rewards
    means = np.array([float(E.S[:, j].copy() @ theta) for j in range(d)])
    best = optimal_value(inst, E)
    rec = _SegmentRecorder(T, best - means)
    acc = RoundRobinAccumulator(d)
    timing = {"warmup": 0.0, "explore": 0.0, "commit": 0.0}

    def play_round_robin(n: int) -> None:
        rec.round_robin(n, acc.n % d)
        left = n
        while left > 0:
            m = min(left, chunk)
            acc.absorb_stream(means, inst.noise.sample(rng, size=m))
            left -= m

    info = {"iota_hat": None, "B_hat": None, "N_e": None, "commit_time": None}
    t = 0
    tic = time.perf_counter()
    B_hat = None
    if known_norm is not None:
        if not known_norm > 0:
            raise ContractViolation("known norm must be positive")
        B_hat = float(known_norm)
    else:
        i = 1
        while t < T:
            n_i, _, _ = schedule(i, d, T)
            steps = min(n_i, T - t)
            play_round_robin(steps)
            t += steps
            if steps < n_i:
                break
            est = ls_from_accumulator(acc, E)
            if est.anorm > warmup_threshold(alpha, i, d, T, sigma):
                info["iota_hat"] = i
                B_hat = est.anorm
                break
            acc.reset()
            i += 1
    info["warmup_length"] = t
    timing["warmup"] = time.perf_counter() - tic

    phase = Phase.WARMUP
    if B_hat is not None:
        tic = time.perf_counter()
        phase = Phase.EXPLORE
        N_e = exploration_budget(B_hat, sigma, d, T)
        info["B_hat"], info["N_e"] = B_hat, N_e
        acc.reset()
        steps = min(N_e, T - t)
        play_round_robin(steps)
        t += steps
        timing["explore"] = time.perf_counter() - tic
        if steps == N_e:
            tic = time.perf_counter()
            theta_hat = ls_from_accumulator(acc, E).theta_hat
            commit_x = optimal_action(E, theta_hat)
            phase = Phase.COMMIT
            info["commit_time"] = t
            info["theta_hat"] = theta_hat
            info["commit_x"] = commit_x
            rec.constant(T - t, best - float(theta @ commit_x))
            t = T
            timing["commit"] = time.perf_counter() - tic
    info["phase"] = phase.value
    info["committed"] = phase is Phase.COMMIT
    info["timing"] = timing
    return RegretTrace(T=T, steps=rec.steps, cumulative=rec.values, info=info)
