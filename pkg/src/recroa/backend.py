"""Selects the kernel backend: numba-accelerated or pure numpy.

The default comes from the ``RECROA_BACKEND`` environment variable
(``numba``, ``numpy``, or ``auto``; auto picks numba when importable).
Tests and the benchmark can switch at runtime via ``select_backend``.
"""

from __future__ import annotations

import os

from . import _kernels_np

ENV_VAR = "RECROA_BACKEND"

_BACKENDS = {"numpy": _kernels_np}

try:
    from . import _kernels_nb

    _BACKENDS["numba"] = _kernels_nb
except ImportError:  # numba not installed: numpy fallback only
    _kernels_nb = None


def _resolve(name: str) -> str:
    name = name.lower()
    if name == "auto":
        return "numba" if "numba" in _BACKENDS else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}; expected numba, numpy, or auto")
    if name not in _BACKENDS:
        raise RuntimeError("numba backend requested but numba is not importable")
    return name


_active = _resolve(os.environ.get(ENV_VAR, "auto"))


def active_backend() -> str:
    return _active


def select_backend(name: str) -> str:
    """Switch backends at runtime; returns the previously active name."""
    global _active
    previous = _active
    _active = _resolve(name)
    return previous


def kernels():
    """The module implementing the active backend's kernels."""
    return _BACKENDS[_active]


def set_workers(n: int) -> int:
    """Cap the numba threading pool at n threads (no-op on the numpy backend).

    Returns the effective thread count.
    """
    if n < 1:
        raise ValueError("worker count must be >= 1")
    if _kernels_nb is None:
        return 1
    import numba

    effective = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(effective)
    return effective
