"""Scalar root finding and adaptive one-dimensional quadrature.

Nothing in here knows about photons; the allocator and closed-form modules
pass closures in.  Everything is a pure function of its arguments.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NoConvergence, NoSignChange, RangeExhausted

__all__ = [
    "Bracket",
    "Tolerance",
    "default_tolerance",
    "find_root",
    "expand_bracket",
    "integrate",
    "TOL_ENV_VAR",
]

TOL_ENV_VAR = "BOSONIC_CAPACITY_TOL"
DEFAULT_REL_TOL = 1e-10
_EPS = np.finfo(float).eps
_TINY = 5e-324


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise DomainError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule shared by the root finder and the integrator.

    For :func:`integrate`, ``max_iter`` caps the number of subintervals.
    """

    rel: float = DEFAULT_REL_TOL
    abs: float = 0.0
    max_iter: int = 500

    def __post_init__(self):
        if not self.rel > 0:
            raise DomainError("rel tolerance must be > 0")
        if not self.abs >= 0:
            raise DomainError("abs tolerance must be >= 0")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")


def default_tolerance() -> Tolerance:
    """Default tolerance, honouring the ``BOSONIC_CAPACITY_TOL`` override."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw.strip() == "":
        return Tolerance()
    try:
        rel = float(raw)
    except ValueError:
        raise DomainError(f"{TOL_ENV_VAR} must be a number, got {raw!r}") from None
    return Tolerance(rel=rel)


def _midpoint(lo: float, hi: float) -> float:
    # Split at zero first, then bisect wide one-signed brackets geometrically
    # (treating 0 as the smallest subnormal) so that roots of any magnitude
    # are reached in O(log log) rather than O(log) steps.
    if lo < 0.0 < hi:
        return 0.0
    if lo >= 0.0 and hi > 4.0 * lo:
        return math.sqrt(max(lo, _TINY)) * math.sqrt(hi)
    if hi <= 0.0 and lo < 4.0 * hi:
        return -math.sqrt(-lo) * math.sqrt(max(-hi, _TINY))
    return lo + 0.5 * (hi - lo)


def find_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol: Tolerance | None = None,
) -> float:
    """Locate a sign change of ``f`` inside ``bracket`` by bisection.

    Returns as soon as ``|f(x)| <= tol.abs`` or the bracket has shrunk to
    ``tol.rel`` relative width (or to adjacent floats).  The result always
    lies inside the input bracket.
    """
    tol = tol or default_tolerance()
    lo, hi = float(bracket.lo), float(bracket.hi)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise NoSignChange(f"f({lo})={flo} and f({hi})={fhi} share a sign")

    for _ in range(tol.max_iter):
        mid = _midpoint(lo, hi)
        if not (lo < mid < hi):
            # adjacent floats: nothing left to bisect
            return lo if abs(flo) <= abs(fhi) else hi
        fm = f(mid)
        if fm == 0.0 or abs(fm) <= tol.abs:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo <= tol.rel * max(abs(lo), abs(hi)):
            return _midpoint(lo, hi)
    raise NoConvergence(f"bisection did not converge in {tol.max_iter} steps")


def expand_bracket(
    f: Callable[[float], float],
    seed: float,
    target: float,
    max_steps: int = 400,
) -> Bracket:
    """Bracket ``f(x) = target`` for decreasing ``f`` by doubling or halving ``seed``.

    The returned bracket satisfies ``f(lo) >= target >= f(hi)``.
    """
    if not seed > 0:
        raise DomainError("seed must be > 0")
    if f(seed) >= target:
        lo, hi = seed, 2.0 * seed
        for _ in range(max_steps):
            if f(hi) <= target:
                return Bracket(lo, hi)
            lo, hi = hi, 2.0 * hi
    else:
        lo, hi = 0.5 * seed, seed
        for _ in range(max_steps):
            if f(lo) >= target:
                return Bracket(lo, hi)
            lo, hi = 0.5 * lo, lo
    raise RangeExhausted(
        f"no bracket for target {target} within {max_steps} doublings of seed {seed}"
    )


# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 interior nodes
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5]] = _WG[:3]
_GAUSS[[9, 11, 13]] = _WG[2::-1]
_GAUSS[7] = _WG[3]


def _gk15(f, a: float, b: float, vectorized: bool) -> tuple[float, float]:
    half = 0.5 * (b - a)
    x = (a + b) * 0.5 + half * _NODES
    if vectorized:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
    else:
        y = np.array([f(float(xi)) for xi in x], dtype=float)
    if not np.all(np.isfinite(y)):
        raise DomainError(f"integrand not finite on [{a}, {b}]")
    kronrod = half * float(_KRONROD @ y)
    gauss = half * float(_GAUSS @ y)
    return kronrod, abs(kronrod - gauss)


def integrate(
    f: Callable,
    a: float,
    b: float,
    tol: Tolerance | None = None,
    *,
    vectorized: bool = True,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with globally adaptive Gauss-Kronrod 7/15.

    The integrand is only sampled at interior nodes, never at ``a`` or ``b``;
    an integrand with a removable singularity at an endpoint should still
    short-circuit to its limit before it overflows.  With ``vectorized=True``
    (the default) ``f`` receives a 15-element array per panel.
    """
    tol = tol or default_tolerance()
    if not a <= b:
        raise DomainError("integrate requires a <= b")
    if a == b:
        return 0.0
    rel = max(tol.rel, 50.0 * _EPS)

    val, err = _gk15(f, a, b, vectorized)
    heap = [(-err, a, b, val, err)]
    for _ in range(tol.max_iter):
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(item[4] for item in heap)
        if total_err <= max(tol.abs, rel * abs(total)):
            return total
        _, lo, hi, _, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        for x0, x1 in ((lo, mid), (mid, hi)):
            v, e = _gk15(f, x0, x1, vectorized)
            heapq.heappush(heap, (-e, x0, x1, v, e))
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(item[4] for item in heap)
    if total_err <= max(tol.abs, rel * abs(total)):
        return total
    raise NoConvergence(
        f"quadrature error estimate {total_err:.3e} above target after "
        f"{len(heap)} panels"
    )
