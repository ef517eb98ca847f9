import itertools
import math

import numpy as np
import pytest

from e2tc.bounds import lower_bound_floor
from e2tc.ellipsoid import EllipsoidSet, mnorm, random_pd_matrix
from e2tc.environment import BanditInstance, run_rng
from e2tc.errors import ContractViolation
from e2tc.explore_commit import simulate_e2tc
from e2tc.lowerbound import (
    GaussianPrior,
    assouad_theta,
    build_assouad,
    family_constants,
    flip_coordinate,
    neighborhood_radius,
    sample_prior,
)


def _family(D, rng, B=1.0, T=10_000, sigma=1.0, c=None):
    A = random_pd_matrix(D, rng)
    u = rng.normal(size=D)
    return build_assouad(B * u / mnorm(A, u), B, T, sigma, A, c=c, seed=3), A


def test_constants_examples():
    eps, C = family_constants(1.0, 10_000, 1.0, 10)
    assert C == pytest.approx(1 / (2 * math.sqrt(2)))
    assert eps == pytest.approx(10 * C / math.sqrt(20_000))
    eps, C = family_constants(1.0, 100, 40.0, 1)
    assert eps == pytest.approx(1.0, rel=1e-15)
    assert neighborhood_radius(1.0, 10_000, 1.0, 10) == pytest.approx(0.1)
    assert neighborhood_radius(1.0, 4, 100.0, 10) == 4.0


def test_basis_orthonormal_and_aligned(rng):
    for c in (None, rng.normal(size=6)):
        f, A = _family(6, rng, c=c)
        np.testing.assert_allclose(f.basis.T @ f.basis, np.eye(6), atol=1e-12)
        root = np.linalg.inv(f.A_inv_sqrt)
        u = root @ f.theta_base
        np.testing.assert_allclose(f.basis[:, f.d], u / np.linalg.norm(u), atol=1e-12)
        if c is not None:
            w = f.A_inv_sqrt @ c
            resid = w - f.basis[:, f.d:] @ (f.basis[:, f.d:].T @ w)
            assert np.linalg.norm(resid) < 1e-10 * np.linalg.norm(w)


@pytest.mark.parametrize("D", [3, 4, 6, 10])
def test_family_on_sphere_and_near_base(D, rng):
    f, A = _family(D, rng, B=2.5, T=5000, sigma=0.7)
    r = neighborhood_radius(2.5, 5000, 0.7, D - 2)
    thetas = list(f.all_thetas())
    assert len(thetas) == 2 ** (D - 2)
    for _, th in thetas:
        assert mnorm(A, th) == pytest.approx(2.5, abs=1e-9)
        diff = f.theta_base - th
        assert diff @ A @ diff <= r + 1e-9


def test_flip_changes_one_coordinate_distance(rng):
    f, A = _family(5, rng)
    xi = np.array([1, -1, 1])
    for i in range(3):
        diff = f.theta(xi) - f.theta(flip_coordinate(xi, i))
        expected = 2 * f.B * f.eps / math.sqrt(f.d)
        assert mnorm(A, diff) == pytest.approx(expected, rel=1e-9)


def test_family_approaches_base_as_eps_vanishes(rng):
    f, A = _family(5, rng, T=10**14)
    for _, th in f.all_thetas():
        np.testing.assert_allclose(th, f.theta_base, atol=1e-5 * f.B)


def test_build_validation(rng):
    A = np.eye(3)
    with pytest.raises(ContractViolation):
        build_assouad([1.0, 0.0, 0.0], 2.0, 100, 1.0, A)
    with pytest.raises(ContractViolation):
        build_assouad([1.0, 0.0], 1.0, 100, 1.0, np.eye(2))
    f = build_assouad([1.0, 0.0, 0.0], 1.0, 100, 1.0, A)
    with pytest.raises(ContractViolation):
        assouad_theta(f, [1, 0])


def test_prior_covariance(rng):
    A = random_pd_matrix(4, rng)
    p = GaussianPrior(3.0, A)
    draws = sample_prior(p, rng, size=200_000)
    np.testing.assert_allclose(np.cov(draws.T), p.covariance, rtol=0.05, atol=0.05 * np.abs(p.covariance).max())
    assert sample_prior(p, rng).shape == (4,)
    mean_sq = np.mean(np.einsum("ij,jk,ik->i", draws, A, draws))
    assert mean_sq == pytest.approx(9.0, rel=0.02)


@pytest.mark.slow
def test_family_is_hard_for_e2tc(rng):
    """Mean regret over the family stays above a fraction of the minimax floor."""
    D, T, B = 4, 10_000, 1.0
    E = EllipsoidSet.ball(D)
    f = build_assouad(np.eye(D)[0], B, T, 1.0, np.eye(D), seed=0)
    finals = []
    for _, th in f.all_thetas():
        inst = BanditInstance(th)
        finals += [simulate_e2tc(E, inst, T, run_rng(0, k)).final for k in range(10)]
    assert np.mean(finals) >= lower_bound_floor(f.d, 1.0, T, B) / 20
