"""Analytic capacities: narrowband, flat broadband and far-field free space.

Far-field results are computed in normalized form and depend on the
geometry only through ``P/P0``; rates are reported per ``omega_c T / 2 pi``
(the number of modes below the cutoff), and converted to bits per second
with ``omega_c / 2 pi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .allocator import RateResult, capacity
from .channel import (
    HBAR,
    FarFieldGeometry,
    ModeSet,
    ResourceBudget,
    reference_power,
)
from .errors import DomainError, FarFieldInvalidWarning, Infeasible
from .kernels import DetectionKind, g
from .numerics import (
    Bracket,
    Tolerance,
    default_tolerance,
    expand_bracket,
    find_root,
    integrate,
)

__all__ = [
    "FarFieldSolution",
    "narrowband_capacity",
    "flat_broadband_capacity",
    "flat_broadband_rate",
    "flat_broadband_beta",
    "flat_spectrum",
    "holevo_power_integral",
    "holevo_rate_integral",
    "hethom_power_ratio",
    "hethom_rate",
    "solve_y0",
    "farfield_solution",
    "farfield_capacity",
    "farfield_hethom",
    "spectrum",
    "farfield_modes",
    "farfield_discrete",
]

LN2 = math.log(2.0)
_X_FLOOR = 1.0 / 700.0   # below this exp(1/x) overflows; integrands are ~0


def narrowband_capacity(eta: float, mean_photons: float) -> float:
    """Single-mode capacity ``g(eta * N)`` in bits per use."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if not mean_photons >= 0:
        raise DomainError("mean photon number must be >= 0")
    return g(eta * mean_photons)


def _check_flat(eta, power, time):
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if not power >= 0:
        raise DomainError("power must be >= 0")
    if time is not None and not time > 0:
        raise DomainError("time must be > 0")


def flat_broadband_rate(eta: float, power: float, hbar: float = HBAR) -> float:
    """Continuum capacity of a flat-loss broadband channel in bits per second."""
    _check_flat(eta, power, None)
    return math.sqrt(eta) / LN2 * math.sqrt(math.pi * power / (3.0 * hbar))


def flat_broadband_capacity(
    eta: float, power: float, time: float, hbar: float = HBAR
) -> float:
    """Total bits over transmission time ``time``.  Pass ``hbar=1`` for normalized units."""
    _check_flat(eta, power, time)
    return flat_broadband_rate(eta, power, hbar) * time


def flat_broadband_beta(eta: float, power: float) -> float:
    """Continuum multiplier for the flat channel (hbar = 1)."""
    _check_flat(eta, power, None)
    if power == 0 or eta == 0:
        return math.inf
    return eta * math.sqrt(math.pi / (12.0 * eta * power))


def flat_spectrum(eta: float, power: float, omega) -> np.ndarray:
    """Continuum Holevo spectrum ``omega * N(omega)`` of the flat channel (hbar = 1)."""
    beta = flat_broadband_beta(eta, power)
    omega = np.asarray(omega, dtype=float)
    z = beta * omega / eta
    out = np.zeros_like(omega)
    live = z <= 700.0
    out[live] = omega[live] / (eta * np.expm1(z[live]))
    return out


# -- far field, Holevo ------------------------------------------------------

def _power_integrand(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    live = x > _X_FLOOR
    xl = x[live]
    out[live] = 1.0 / (xl * np.expm1(1.0 / xl))
    return out


def _rate_integrand(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    live = x > _X_FLOOR
    out[live] = g(1.0 / np.expm1(1.0 / x[live]))
    return out


def holevo_power_integral(y0: float, tol: Tolerance | None = None) -> float:
    """``P/P0`` as a function of the far-field parameter ``y0``."""
    return integrate(_power_integrand, 0.0, y0, tol)


def holevo_rate_integral(y0: float, tol: Tolerance | None = None) -> float:
    """``integral_0^y0 g(1/(exp(1/x) - 1)) dx``."""
    return integrate(_rate_integrand, 0.0, y0, tol)


# -- far field, heterodyne / homodyne --------------------------------------

_SERIES_T = 0.05


def _h(t: float) -> float:
    """``t - log1p(t)`` without cancellation for small ``t``."""
    if t < _SERIES_T:
        return sum((-1) ** n * t**n / n for n in range(2, 24))
    return t - math.log1p(t)


def _r(t: float) -> float:
    """``log1p(t) - t/(1+t)``, i.e. ``1/y - 1 + ln y`` at ``y = 1 + t``."""
    if t < _SERIES_T:
        return sum((-1) ** n * t**n * (1.0 - 1.0 / n) for n in range(2, 24))
    return math.log1p(t) - t / (1.0 + t)


def hethom_power_ratio(y0: float, xi: float) -> float:
    """``P/P0 = xi^2 (y0 - 1 - ln y0)`` for ``y0 >= 1``."""
    if y0 < 1.0:
        raise DomainError("y0 must be >= 1 for heterodyne/homodyne")
    return xi * xi * _h(y0 - 1.0)


def hethom_rate(y0: float, xi: float) -> float:
    """Normalized rate ``xi (1/y0 - 1 + ln y0) / ln 2``."""
    if y0 < 1.0:
        raise DomainError("y0 must be >= 1 for heterodyne/homodyne")
    return xi * _r(y0 - 1.0) / LN2


def solve_y0(
    power_ratio: float,
    detection: DetectionKind = DetectionKind.HOLEVO,
    tol: Tolerance | None = None,
) -> float:
    """Invert the far-field power constraint for ``y0``.

    The Holevo constraint is an integral and is solved to ``tol.rel``; the
    heterodyne/homodyne one is elementary and is solved to a few ulp on
    ``t = y0 - 1`` so that roots just above 1 keep their digits.
    """
    if not power_ratio > 0:
        raise Infeasible(f"power ratio must be > 0, got {power_ratio}")
    if detection is DetectionKind.HOLEVO:
        tol = tol or default_tolerance()
        quad_tol = Tolerance(rel=tol.rel * 1e-2, max_iter=2000)
        bracket = expand_bracket(
            lambda y: -holevo_power_integral(y, quad_tol),
            max(power_ratio, 0.05),
            -power_ratio,
        )
        return find_root(
            lambda y: holevo_power_integral(y, quad_tol) - power_ratio, bracket, tol
        )
    target = power_ratio / detection.xi**2
    seed = math.sqrt(2.0 * target) if target < 1.0 else target
    bracket = expand_bracket(lambda t: -_h(t), seed, -target)
    t = find_root(
        lambda t: _h(t) - target, bracket, Tolerance(rel=1e-15, max_iter=400)
    )
    return 1.0 + t


@dataclass(frozen=True)
class FarFieldSolution:
    """Solved far-field operating point.

    ``rate_normalized`` is in bits per ``omega_c T / 2 pi``.  With the default
    ``omega_c = 1`` all frequencies are in units of the cutoff.
    """

    y0: float
    power_ratio: float
    rate_normalized: float
    detection: DetectionKind
    omega_c: float = 1.0
    fresnel_at_cutoff: float | None = None
    time: float | None = None

    @property
    def rate_bits_per_sec(self) -> float:
        return self.rate_normalized * self.omega_c / (2.0 * math.pi)

    @property
    def total_bits(self) -> float | None:
        return None if self.time is None else self.rate_bits_per_sec * self.time

    @property
    def omega_cut(self) -> float | None:
        """Lowest frequency in use (heterodyne/homodyne only)."""
        if self.detection is DetectionKind.HOLEVO:
            return None
        return self.omega_c / self.y0


def farfield_solution(
    power_ratio: float,
    detection: DetectionKind = DetectionKind.HOLEVO,
    tol: Tolerance | None = None,
) -> FarFieldSolution:
    """Normalized far-field solution at ``P/P0 = power_ratio``."""
    y0 = solve_y0(power_ratio, detection, tol)
    if detection is DetectionKind.HOLEVO:
        tol = tol or default_tolerance()
        quad_tol = Tolerance(rel=tol.rel * 1e-2, max_iter=2000)
        value = holevo_rate_integral(y0, quad_tol) / y0
    else:
        value = hethom_rate(y0, detection.xi)
    return FarFieldSolution(y0, power_ratio, value, detection)


def _with_geometry(sol, geometry, time):
    return FarFieldSolution(
        sol.y0, sol.power_ratio, sol.rate_normalized, sol.detection,
        geometry.omega_c, geometry.fresnel_at_cutoff, time,
    )


def _warn_validity(geometry):
    if not geometry.far_field_valid:
        warnings.warn(
            f"D(omega_c) = {geometry.fresnel_at_cutoff:.3g} > 0.1; far-field model invalid",
            FarFieldInvalidWarning,
            stacklevel=3,
        )


def farfield_capacity(
    geometry: FarFieldGeometry,
    power: float,
    time: float | None = None,
    tol: Tolerance | None = None,
) -> FarFieldSolution:
    """Holevo capacity of the far-field channel at transmitted power ``power`` (W)."""
    if not power > 0:
        raise Infeasible("power must be > 0")
    _warn_validity(geometry)
    ratio = power / reference_power(geometry)
    return _with_geometry(farfield_solution(ratio, DetectionKind.HOLEVO, tol), geometry, time)


def farfield_hethom(
    geometry: FarFieldGeometry,
    power: float,
    time: float | None = None,
    detection: DetectionKind = DetectionKind.HETERODYNE,
    tol: Tolerance | None = None,
) -> FarFieldSolution:
    """Heterodyne or homodyne rate of the far-field channel (coherent-state inputs)."""
    if not detection.is_shannon:
        raise DomainError("farfield_hethom needs heterodyne or homodyne detection")
    if not power > 0:
        raise Infeasible("power must be > 0")
    _warn_validity(geometry)
    ratio = power / reference_power(geometry)
    return _with_geometry(farfield_solution(ratio, detection, tol), geometry, time)


def spectrum(solution: FarFieldSolution, n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Continuum power spectrum ``omega * N(omega)`` on ``omega/omega_c = j/n``.

    The spectrum is scaled by ``D(omega_c) / omega_c`` so that it integrates
    over ``omega/omega_c`` in ``[0, 1]`` to ``P/P0``.
    """
    if n_points < 1:
        raise DomainError("n_points must be >= 1")
    u = np.arange(1, n_points + 1, dtype=float) / n_points
    y0 = solution.y0
    if solution.detection is DetectionKind.HOLEVO:
        z = 1.0 / (y0 * u)
        s = np.zeros_like(u)
        live = z <= 700.0
        s[live] = 1.0 / (u[live] * np.expm1(z[live]))
    else:
        s = solution.detection.xi**2 * np.maximum(y0 - 1.0 / u, 0.0)
    return u, s


def farfield_modes(fresnel_at_cutoff: float, n_modes: int) -> ModeSet:
    """Far-field grid ``omega_k = k/n`` (units of ``omega_c``) with quadratic transmissivity."""
    u = np.arange(1, n_modes + 1, dtype=float) / n_modes
    return ModeSet(u, fresnel_at_cutoff * u * u)


def farfield_discrete(
    power_ratio: float,
    detection: DetectionKind = DetectionKind.HOLEVO,
    n_modes: int = 10_000,
    fresnel_at_cutoff: float = 0.01,
) -> tuple[float, RateResult]:
    """Discrete-allocator counterpart of :func:`farfield_solution`.

    Returns the rate normalized like ``FarFieldSolution.rate_normalized``
    together with the raw per-use result.
    """
    modes = farfield_modes(fresnel_at_cutoff, n_modes)
    # E = P T with T = 2 pi / delta_omega and P0 = 1 / (2 pi D_c) in these units
    budget = ResourceBudget(power_ratio * n_modes / fresnel_at_cutoff)
    result = capacity(modes, budget, detection)
    return result.value / n_modes, result
