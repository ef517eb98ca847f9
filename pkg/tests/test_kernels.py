import os
import subprocess
import sys

import numpy as np
import pytest

from e2tc import _kernels_py, kernels
from e2tc.ellipsoid import EllipsoidSet
from e2tc.environment import BanditInstance
from e2tc.explore_commit import simulate_e2tc

try:
    from e2tc import _kernels as compiled
except ImportError:  # pragma: no cover - fallback-only install
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def _naive_absorb(s, means, noise, offset):
    d = s.shape[0]
    for k, z in enumerate(noise):
        j = (offset + k) % d
        s[j] += means[j] + z


@pytest.mark.parametrize("impl", ["python", "cython"])
@pytest.mark.parametrize("d,n,offset", [(1, 7, 0), (3, 10, 2), (5, 0, 1), (8, 64, 7), (4, 3, 3)])
def test_absorb_matches_loop(impl, d, n, offset, rng):
    mod = _kernels_py if impl == "python" else compiled
    if mod is None:
        pytest.skip("compiled extension not built")
    means, noise = rng.normal(size=d), rng.normal(size=n)
    s, ref = rng.normal(size=d), None
    ref = s.copy()
    _naive_absorb(ref, means, noise, offset)
    mod.absorb_round_robin(s, means, noise, offset)
    np.testing.assert_allclose(s, ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("impl", ["python", "cython"])
@pytest.mark.parametrize("d,n", [(1, 5), (4, 4), (4, 10), (6, 3)])
def test_round_robin_sums_matches_loop(impl, d, n, rng):
    mod = _kernels_py if impl == "python" else compiled
    if mod is None:
        pytest.skip("compiled extension not built")
    noise = rng.normal(size=(11, n))
    ref = np.zeros((11, d))
    for k in range(n):
        ref[:, k % d] += noise[:, k]
    np.testing.assert_allclose(mod.round_robin_sums(noise, d), ref, rtol=1e-12, atol=1e-12)


@needs_compiled
def test_backends_give_same_episode():
    E = EllipsoidSet.ball(7)
    inst = BanditInstance(np.linspace(-1, 1, 7))
    saved = kernels.BACKEND
    try:
        kernels.set_backend("python")
        a = simulate_e2tc(E, inst, 50_000, np.random.default_rng(4))
        kernels.set_backend("cython")
        b = simulate_e2tc(E, inst, 50_000, np.random.default_rng(4))
    finally:
        kernels.set_backend(saved)
    for key in ("B_hat", "N_e", "warmup_length"):
        assert a.info[key] == b.info[key], key
    np.testing.assert_allclose(a.cumulative, b.cumulative, rtol=1e-10)


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_env_var_forces_fallback():
    env = dict(os.environ, E2TC_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import e2tc; print(e2tc.KERNEL_BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
