"""Timing of the compiled kernel against the numpy fallback."""

from __future__ import annotations

import time

import numpy as np

from . import _kernels_py, kernels
from .ellipsoid import EllipsoidSet
from .environment import BanditInstance, NoiseModel
from .explore_commit import simulate_e2tc


def _best_of(fn, repeat: int = 5) -> float:
    best = float("inf")
    for _ in range(repeat):
        tic = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - tic)
    return best


def compare_backends(d: int = 100, T: int = 100_000, seed: int = 0) -> dict:
    """Best-of-5 seconds for the absorb kernel and a full episode under each backend."""
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(T)
    means = rng.standard_normal(d)
    E = EllipsoidSet.ball(d)
    inst = BanditInstance(means / np.linalg.norm(means), NoiseModel("gaussian", 1.0))
    impls = {"python": _kernels_py}
    if compiled is not None:
        impls["cython"] = compiled
    out = {"d": d, "T": T, "default_backend": kernels.BACKEND}
    saved = kernels.BACKEND
    try:
        for name, mod in impls.items():
            s = np.zeros(d)
            out[f"absorb_{name}_s"] = _best_of(lambda: mod.absorb_round_robin(s, means, noise, 0))
            kernels.set_backend(name)
            out[f"episode_{name}_s"] = _best_of(
                lambda: simulate_e2tc(E, inst, T, np.random.default_rng(seed)), repeat=3
            )
    finally:
        kernels.set_backend(saved)
    if "cython" in impls:
        out["absorb_speedup"] = out["absorb_python_s"] / out["absorb_cython_s"]
        out["episode_speedup"] = out["episode_python_s"] / out["episode_cython_s"]
    return out
