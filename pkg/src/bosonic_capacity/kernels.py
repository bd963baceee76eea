"""Per-mode information kernels.

``g`` is the entropy (in bits) of a thermal bosonic mode holding ``x`` mean
photons; ``shannon_term`` is the Gaussian-channel rate seen by a heterodyne
(``xi = 1``) or homodyne (``xi = 1/2``) receiver.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from ._backend import numpy_kernels as _np_k
from .errors import DomainError
from .numerics import Bracket, Tolerance, find_root

__all__ = ["DetectionKind", "g", "shannon_term", "g_inverse", "SMALL_X"]

SMALL_X = _np_k.SMALL_X


class DetectionKind(enum.Enum):
    HOLEVO = "holevo"
    HETERODYNE = "heterodyne"
    HOMODYNE = "homodyne"

    @property
    def xi(self) -> float | None:
        return _XI.get(self)

    @property
    def is_shannon(self) -> bool:
        return self is not DetectionKind.HOLEVO

    @classmethod
    def parse(cls, text: str) -> "DetectionKind":
        key = text.strip().lower()
        for kind in cls:
            if key == kind.value or key == kind.value[:3]:
                return kind
        raise DomainError(f"unknown detection kind {text!r}")


_XI = {DetectionKind.HETERODYNE: 1.0, DetectionKind.HOMODYNE: 0.5}


def _check_photons(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0")
    return arr


def g(x):
    """Thermal-state entropy ``(x+1) log2(x+1) - x log2 x`` in bits.

    Exactly 0 at ``x = 0``.  Below ``SMALL_X`` a two-term expansion replaces
    the closed form, which loses digits to ``x log x`` there.  Accepts
    scalars or arrays.
    """
    arr = _check_photons(x)
    out = _np_k.g_values(np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def shannon_term(etaN, xi: float):
    """``xi * log2(1 + etaN / xi**2)``; scalar or array ``etaN``."""
    arr = _check_photons(etaN, "etaN")
    if xi not in (0.5, 1.0):
        raise DomainError(f"xi must be 1/2 or 1, got {xi}")
    out = xi * np.log1p(arr / (xi * xi)) / math.log(2.0)
    return float(out) if arr.ndim == 0 else out


def g_inverse(c: float, tol: Tolerance | None = None) -> float:
    """Mean photon number ``x`` with ``g(x) = c``."""
    c = float(c)
    if not math.isfinite(c) or c < 0:
        raise DomainError("c must be finite and >= 0")
    if c == 0.0:
        return 0.0
    if c > 1000.0:
        raise DomainError("g_inverse is limited to c <= 1000 bits")
    tol = tol or Tolerance(rel=1e-14, max_iter=400)
    # g(x) >= log2(1 + x) puts the root below 2**c - 1
    hi = max(2.0**c, 1.0)
    return find_root(lambda x: g(x) - c, Bracket(0.0, hi), tol)
