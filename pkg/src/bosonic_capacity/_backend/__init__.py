"""Backend selection for the per-mode hot loops.

``BOSONIC_CAPACITY_BACKEND=numba`` selects the loop-fused numba kernels;
the default is numpy, whose SIMD ``log1p``/``expm1`` beat numba's scalar
libm calls on a single core (see ``benchmarks/bench_backends.py``).  Both
modules expose the same functions, so callers go through :func:`get` or the
module-level ``active``.
"""

import importlib
import logging
import os

BACKEND_ENV_VAR = "BOSONIC_CAPACITY_BACKEND"
AVAILABLE = ("numba", "numpy")

logger = logging.getLogger(__name__)


def get(name):
    if name not in AVAILABLE:
        raise ValueError(f"unknown backend {name!r}; choose from {AVAILABLE}")
    return importlib.import_module(f"{__name__}.{name}_kernels")


def numba_available():
    try:
        importlib.import_module("numba")
    except ImportError:
        return False
    return True


def _select():
    requested = os.environ.get(BACKEND_ENV_VAR, "").strip().lower()
    if requested in ("", "numpy"):
        return "numpy"
    if requested != "numba":
        raise ValueError(f"{BACKEND_ENV_VAR}={requested!r}; expected numba or numpy")
    if numba_available():
        return "numba"
    logger.warning("numba requested but not importable; using numpy kernels")
    return "numpy"


name = _select()
active = get(name)


def set_backend(backend_name):
    """Switch the process-wide kernels; returns the previous backend name."""
    global name, active
    module = get(backend_name)
    previous = name
    name, active = backend_name, module
    return previous


class use:
    """Context manager that runs a block on the named backend."""

    def __init__(self, backend_name):
        self.backend_name = backend_name

    def __enter__(self):
        self._previous = set_backend(self.backend_name)
        return active

    def __exit__(self, *exc):
        set_backend(self._previous)
        return False
