"""Kernel backend selection.

The compiled extension is used when it was built; set ``E2TC_PURE_PYTHON=1``
to force the numpy fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("E2TC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

absorb_round_robin = _impl.absorb_round_robin
round_robin_sums = _impl.round_robin_sums


def set_backend(name: str) -> None:
    """Switch the module-level kernels to ``"cython"`` or ``"python"``."""
    global BACKEND, absorb_round_robin, round_robin_sums
    if name == "cython":
        from . import _kernels as impl  # raises ImportError when not built
    elif name == "python":
        impl = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    absorb_round_robin = impl.absorb_round_robin
    round_robin_sums = impl.round_robin_sums


__all__ = ["BACKEND", "absorb_round_robin", "round_robin_sums", "set_backend"]
