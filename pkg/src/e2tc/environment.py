"""Simulated linear bandit: noisy rewards, pseudo-regret, episode driver."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .ellipsoid import GEOM_TOL, EllipsoidSet, _as_vector, membership, optimal_action
from .errors import ContractViolation, PolicyViolation

_MASK64 = (1 << 64) - 1


class NoiseKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class NoiseModel:
    """Centered sigma^2-sub-gaussian noise.

    Uniform noise lives on ``[-sigma, sigma]`` (not variance matched) so the
    sub-gaussian proxy is exactly ``sigma^2`` for every kind.
    """

    kind: NoiseKind = NoiseKind.GAUSSIAN
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not self.sigma >= 0:
            raise ContractViolation(f"noise scale must be >= 0, got {self.sigma}")

    def sample(self, rng: np.random.Generator, size=None):
        # One uniform or normal draw per sample, so scalar and batched draws
        # consume the stream identically.
        if self.kind is NoiseKind.GAUSSIAN:
            z = rng.standard_normal(size)
        elif self.kind is NoiseKind.RADEMACHER:
            z = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        else:
            z = 2.0 * rng.random(size) - 1.0
        if size is None:
            return self.sigma * float(z)
        return self.sigma * z


@dataclass(frozen=True, eq=False)
class BanditInstance:
    theta: np.ndarray
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        theta = _as_vector(self.theta, name="theta").copy()
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def d(self) -> int:
        return self.theta.shape[0]


class Policy(Protocol):
    def next_action(self) -> np.ndarray: ...

    def observe(self, y: float) -> None: ...


def pull(inst: BanditInstance, x, rng: np.random.Generator) -> float:
    """Reward ``x^T theta + z`` with ``z`` drawn from the instance noise."""
    x = _as_vector(x, inst.d, "action")
    return float(x @ inst.theta) + inst.noise.sample(rng)


def optimal_value(inst: BanditInstance, E: EllipsoidSet) -> float:
    """``max_{x in E} theta^T x``; equals ``theta^T c`` when theta = 0."""
    if not np.any(inst.theta):
        return float(inst.theta @ E.c)
    return float(inst.theta @ optimal_action(E, inst.theta))


def instantaneous_regret(inst: BanditInstance, E: EllipsoidSet, x) -> float:
    x = _as_vector(x, E.d, "action")
    if not membership(E, x):
        raise ContractViolation("action lies outside the action set")
    return optimal_value(inst, E) - float(inst.theta @ x)


def checkpoints(T: int) -> np.ndarray:
    """Steps ``1, 2, 4, ...`` up to ``T``, plus ``T`` itself."""
    if T < 1:
        raise ContractViolation("horizon must be >= 1")
    pts = [1 << k for k in range(T.bit_length()) if (1 << k) <= T]
    if pts[-1] != T:
        pts.append(T)
    return np.asarray(pts, dtype=np.int64)


@dataclass
class RegretTrace:
    """Cumulative pseudo-regret of one episode.

    ``steps``/``cumulative`` hold the value after step ``t`` (1-based) at the
    geometric checkpoints. The per-step arrays are only kept when requested.
    """

    T: int
    steps: np.ndarray
    cumulative: np.ndarray
    actions: np.ndarray | None = None
    rewards: np.ndarray | None = None
    regrets: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    @property
    def final(self) -> float:
        return float(self.cumulative[-1])

    def same_as(self, other: "RegretTrace") -> bool:
        """Bitwise equality of everything recorded."""
        if self.T != other.T:
            return False
        pairs = [(self.steps, other.steps), (self.cumulative, other.cumulative)]
        for name in ("actions", "rewards", "regrets"):
            a, b = getattr(self, name), getattr(other, name)
            if (a is None) != (b is None):
                return False
            if a is not None:
                pairs.append((a, b))
        return all(np.array_equal(a, b) for a, b in pairs)


def run_episode(
    policy: Policy,
    inst: BanditInstance,
    E: EllipsoidSet,
    T: int,
    rng: np.random.Generator,
    record_full: bool = False,
) -> RegretTrace:
    """Play ``T`` rounds of ``policy`` against ``inst`` on action set ``E``."""
    if T < 1:
        raise ContractViolation("horizon must be >= 1")
    if inst.d != E.d:
        raise ContractViolation("instance and action set dimensions differ")
    theta = inst.theta
    best = optimal_value(inst, E)
    ckpts = checkpoints(T)
    cum_at = np.empty(ckpts.shape[0])
    if record_full:
        actions = np.empty((T, E.d))
        rewards = np.empty(T)
        regrets = np.empty(T)
    S_inv = E.S_inv_t.T
    c = E.c
    cum = 0.0
    k = 0
    for t in range(T):
        x = np.asarray(policy.next_action(), dtype=float)
        if x.shape != (E.d,):
            raise PolicyViolation(f"step {t}: action has shape {x.shape}")
        w = S_inv @ (x - c)
        if float(w @ w) > 1.0 + GEOM_TOL:
            raise PolicyViolation(f"step {t}: infeasible action {x}")
        y = float(x @ theta) + inst.noise.sample(rng)
        policy.observe(y)
        r = best - float(theta @ x)
        cum += r
        if record_full:
            actions[t] = x
            rewards[t] = y
            regrets[t] = r
        if t + 1 == ckpts[k]:
            cum_at[k] = cum
            k += 1
    info = policy.info() if hasattr(policy, "info") else {}
    trace = RegretTrace(T=T, steps=ckpts, cumulative=cum_at, info=info)
    if record_full:
        trace.actions, trace.rewards, trace.regrets = actions, rewards, regrets
    return trace


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def run_seed(base_seed: int, k: int) -> int:
    """Seed of run ``k``: splitmix of the base seed mixed with the run index."""
    return splitmix64(splitmix64(base_seed & _MASK64) ^ (k & _MASK64))


def run_rng(base_seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(run_seed(base_seed, k))
