import math

import numpy as np
import pytest

from e2tc.ellipsoid import EllipsoidSet, optimal_action
from e2tc.environment import BanditInstance, NoiseModel, run_episode
from e2tc.errors import ContractViolation
from e2tc.explore_commit import E2tcPolicy
from e2tc.reduction import ReducedPolicy, reduced_e2tc


class _Recorder:
    """Inner policy stub logging what it receives."""

    def __init__(self, x, T=10, commit_after=None):
        self.x = np.asarray(x, dtype=float)
        self.T = T
        self.t = 0
        self.seen = []
        self.commit_after = commit_after
        self.commit_x = self.x

    def is_committed(self):
        return self.commit_after is not None and self.t >= self.commit_after

    def next_action(self):
        return self.x

    def observe(self, y):
        self.seen.append(y)
        self.t += 1


def test_first_action_is_center():
    p = ReducedPolicy(_Recorder([1.0, 0.0]), [5.0, 5.0], 10)
    np.testing.assert_array_equal(p.next_action(), [5, 5])
    p.observe(0.0)
    np.testing.assert_array_equal(p.next_action(), [6, 5])


def test_committed_plays_translated_commit():
    inner = _Recorder([0.0, 1.0], commit_after=1)
    p = ReducedPolicy(inner, [5.0, 5.0], 10)
    for y in (1.0, 2.0):
        p.next_action()
        p.observe(y)
    assert p.is_committed()
    np.testing.assert_array_equal(p.next_action(), [5, 6])
    np.testing.assert_array_equal(p.committed_x, [5, 6])


def test_inner_receives_reward_differences():
    theta = np.array([1.0, 2.0])
    c = np.array([5.0, 5.0])
    inner = _Recorder([1.0, 0.0])
    p = ReducedPolicy(inner, c, 6)
    for _ in range(6):
        x = p.next_action()
        p.observe(float(theta @ x))
    assert inner.seen == [1.0, 1.0, 1.0]


def test_noiseless_commits_to_translated_optimum(random_ellipsoid, rng):
    for d in (2, 3, 6):
        E = random_ellipsoid(d, centered=False)
        theta = rng.normal(size=d)
        inst = BanditInstance(theta, NoiseModel("gaussian", 0.0))
        p = reduced_e2tc(E, 0.0, 200)
        tr = run_episode(p, inst, E, 200, rng, record_full=True)
        assert p.is_committed()
        np.testing.assert_allclose(p.committed_x, optimal_action(E, theta), rtol=1e-9, atol=1e-9)
        start = p.info()["outer_commit_time"]
        assert start == 4 * d
        np.testing.assert_allclose(tr.regrets[start:], 0.0, atol=1e-9)
        assert tr.final <= 8 * d * E.anorm(theta) + 1e-9


def test_odd_horizon_plays_center_last():
    E = EllipsoidSet.ball(2, c=[1.0, -1.0])
    inst = BanditInstance([0.0, 0.0])
    inner = E2tcPolicy(E.centered(), math.sqrt(2), 3, alpha=1e9)
    p = ReducedPolicy(inner, E.c, 7)
    tr = run_episode(p, inst, E, 7, np.random.default_rng(0), record_full=True)
    assert inner.t == 3
    np.testing.assert_array_equal(tr.actions[-1], E.c)


def test_inner_tuned_for_doubled_variance(random_ellipsoid):
    E = random_ellipsoid(3, centered=False)
    p = reduced_e2tc(E, 2.0, 101)
    assert p.inner.sigma == pytest.approx(2.0 * math.sqrt(2))
    assert p.inner.T == 50
    with pytest.raises(ContractViolation):
        reduced_e2tc(E, 1.0, 1)


def test_horizon_enforced():
    p = ReducedPolicy(_Recorder([1.0]), [0.0], 2)
    for _ in range(2):
        p.next_action()
        p.observe(0.0)
    with pytest.raises(ContractViolation):
        p.next_action()
