"""Optimal photon-number allocation under a mean-energy constraint.

Everything here runs in normalized units: hbar = 1, frequencies in whatever
reference unit the caller picked, energy in hbar times that unit.  The
Lagrange multiplier ``beta`` is found by bisection on the achieved energy,
which is strictly decreasing in ``beta`` for every detection kind.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _backend
from .channel import FlatGrid, ModeSet, ModeSpec, ResourceBudget
from .errors import DimensionMismatch, DomainError, Infeasible, TooManyModes
from .kernels import DetectionKind, g, shannon_term
from .numerics import Tolerance, expand_bracket, find_root

__all__ = [
    "Allocation",
    "RateUnit",
    "RateResult",
    "holevo_photon_numbers",
    "waterfill_photon_numbers",
    "solve_beta",
    "rate",
    "capacity",
    "oracle_grid_search",
    "FLAT_TAIL_RATIO",
    "MAX_FLAT_MODES",
]

Modes = Union[Sequence[ModeSpec], ModeSet, FlatGrid]

FLAT_TAIL_RATIO = 1e-15
MAX_FLAT_MODES = 50_000_000
ORACLE_MAX_MODES = 4
# bisect beta down to a few ulp; needed for the lossless-bound identity
BETA_TOL = Tolerance(rel=1e-15, max_iter=400)


class RateUnit(enum.Enum):
    BITS_PER_USE = "bits_per_use"
    BITS_PER_SECOND = "bits_per_second"


@dataclass(frozen=True, eq=False)
class Allocation:
    photon_numbers: np.ndarray
    beta: float
    achieved_energy: float
    detection: DetectionKind
    active_modes: int


@dataclass(frozen=True, eq=False)
class RateResult:
    value: float
    unit: RateUnit
    detection: DetectionKind
    allocation: Allocation | None = None


def _as_modes(modes: Modes) -> ModeSet | FlatGrid:
    if isinstance(modes, (ModeSet, FlatGrid)):
        return modes
    return ModeSet.from_specs(list(modes))


def _check_beta(beta):
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")


def holevo_photon_numbers(modes: Modes, beta: float) -> np.ndarray:
    """Thermal occupations ``(1/eta) / (exp(beta*omega/eta) - 1)``.

    Zero-transmissivity modes get 0, as do modes whose exponent exceeds 700.
    """
    _check_beta(beta)
    ms = _as_modes(modes)
    if isinstance(ms, FlatGrid):
        raise DomainError("an unbounded flat grid has no finite photon-number vector")
    out = np.zeros(len(ms))
    live = ms.eta > 0
    out[live] = _backend.active.holevo_occupation(ms.omega[live], ms.eta[live], beta)
    return out


def waterfill_photon_numbers(modes: Modes, beta: float, xi: float) -> np.ndarray:
    """Water-filling occupations ``max(1/(beta*omega) - xi**2/eta, 0)``."""
    _check_beta(beta)
    if xi not in (0.5, 1.0):
        raise DomainError(f"xi must be 1/2 or 1, got {xi}")
    ms = _as_modes(modes)
    if isinstance(ms, FlatGrid):
        raise DomainError("an unbounded flat grid has no finite photon-number vector")
    out = np.zeros(len(ms))
    live = ms.eta > 0
    out[live] = _backend.active.waterfill_occupation(
        ms.omega[live], ms.eta[live], beta, xi * xi
    )
    return out


def _flat_mode_count(grid: FlatGrid, beta: float, detection: DetectionKind) -> int:
    a = beta * grid.delta_omega / grid.eta
    if detection is DetectionKind.HOLEVO:
        # first k with N_k < FLAT_TAIL_RATIO * N_1
        k = math.log1p(math.expm1(min(a, 700.0)) / FLAT_TAIL_RATIO) / a
    else:
        # occupations vanish for omega >= eta / (xi^2 beta)
        k = 1.0 / (detection.xi**2 * a)
    if k > MAX_FLAT_MODES:
        raise Infeasible(
            f"flat grid needs {k:.3g} modes at beta={beta:.3g}; use a coarser delta_omega"
        )
    return int(k) + 1


def _occupations(ms: ModeSet, beta: float, detection: DetectionKind) -> np.ndarray:
    if detection is DetectionKind.HOLEVO:
        return holevo_photon_numbers(ms, beta)
    return waterfill_photon_numbers(ms, beta, detection.xi)


def _energy_function(ms: ModeSet | FlatGrid, detection: DetectionKind):
    kern = _backend.active
    if isinstance(ms, FlatGrid):
        def energy(beta):
            sub = ms.modes(_flat_mode_count(ms, beta, detection))
            return _energy_of(kern, sub.omega, sub.eta, beta, detection)
        return energy
    live = ms.eta > 0
    omega, eta = ms.omega[live], ms.eta[live]
    return lambda beta: _energy_of(kern, omega, eta, beta, detection)


def _energy_of(kern, omega, eta, beta, detection):
    if detection is DetectionKind.HOLEVO:
        return kern.holevo_energy(omega, eta, beta)
    return kern.waterfill_energy(omega, eta, beta, detection.xi**2)


def _seed_beta(ms: ModeSet | FlatGrid, energy: float, detection: DetectionKind) -> float:
    if isinstance(ms, FlatGrid):
        # continuum estimates; 1/E would start millions of modes too wide
        if detection is DetectionKind.HOLEVO:
            return ms.eta * math.pi / math.sqrt(6.0 * ms.eta * ms.delta_omega * energy)
        return math.sqrt(ms.eta / (2.0 * detection.xi**2 * ms.delta_omega * energy))
    return 1.0 / energy


def solve_beta(
    modes: Modes,
    budget: ResourceBudget,
    detection: DetectionKind = DetectionKind.HOLEVO,
    tol: Tolerance | None = None,
) -> Allocation:
    """Find the multiplier ``beta`` whose allocation spends exactly ``budget.energy``.

    ``budget`` must already be normalized to the units of the mode
    frequencies.  A zero budget yields the all-zero allocation with
    ``beta = inf``.
    """
    ms = _as_modes(modes)
    energy = budget.energy
    if math.isnan(energy) or energy < 0:
        raise Infeasible(f"energy budget must be >= 0, got {energy}")
    if isinstance(ms, FlatGrid):
        has_live = ms.eta > 0
    else:
        has_live = bool(np.any(ms.eta > 0))
    if energy == 0.0:
        n = 1 if isinstance(ms, FlatGrid) else len(ms)
        return Allocation(np.zeros(n), math.inf, 0.0, detection, 0)
    if not has_live:
        raise Infeasible("every mode has zero transmissivity")

    energy_fn = _energy_function(ms, detection)
    bracket = expand_bracket(energy_fn, _seed_beta(ms, energy, detection), energy)
    beta = find_root(lambda b: energy_fn(b) - energy, bracket, tol or BETA_TOL)

    if isinstance(ms, FlatGrid):
        ms = ms.modes(_flat_mode_count(ms, beta, detection))
    photons = _occupations(ms, beta, detection)
    achieved = float(np.sum(ms.omega * photons))
    return Allocation(photons, beta, achieved, detection, int(np.count_nonzero(photons)))


def rate(modes: Modes, allocation: Allocation) -> RateResult:
    """Sum of the per-mode kernel at the given allocation, in bits per use."""
    ms = _as_modes(modes)
    photons = np.asarray(allocation.photon_numbers, dtype=float)
    if isinstance(ms, FlatGrid):
        ms = ms.modes(photons.size)
    if photons.shape != ms.eta.shape:
        raise DimensionMismatch(
            f"allocation has {photons.size} entries for {len(ms)} modes"
        )
    received = ms.eta * photons
    kind = allocation.detection
    if kind is DetectionKind.HOLEVO:
        value = _backend.active.g_sum(received)
    else:
        value = _backend.active.shannon_sum(received, kind.xi)
    return RateResult(value, RateUnit.BITS_PER_USE, kind, allocation)


def capacity(
    modes: Modes,
    budget: ResourceBudget,
    detection: DetectionKind = DetectionKind.HOLEVO,
    tol: Tolerance | None = None,
) -> RateResult:
    """Optimal rate in bits per use: :func:`solve_beta` followed by :func:`rate`."""
    ms = _as_modes(modes)
    return rate(ms, solve_beta(ms, budget, detection, tol))


def _simplex_grid(n: int, steps: int) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    axes = [np.arange(steps + 1)] * (n - 1)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
    pts = pts[pts.sum(axis=1) <= steps]
    last = steps - pts.sum(axis=1, keepdims=True)
    return np.hstack([pts, last]) / steps


def oracle_grid_search(
    modes: Modes,
    budget: ResourceBudget,
    detection: DetectionKind = DetectionKind.HOLEVO,
    grid_steps: int = 200,
) -> RateResult:
    """Brute-force optimum over energy splits on a simplex grid.

    Test oracle only: it never uses the multiplier form of the solution.
    The best grid point is polished by a pattern search that moves energy
    between pairs of modes with a halving step.
    """
    ms = _as_modes(modes)
    if isinstance(ms, FlatGrid) or len(ms) > ORACLE_MAX_MODES:
        raise TooManyModes(f"grid-search oracle handles at most {ORACLE_MAX_MODES} modes")
    energy = budget.energy
    if energy < 0:
        raise Infeasible("energy budget must be >= 0")
    n = len(ms)
    omega, eta = ms.omega, ms.eta

    def objective(fractions):
        received = eta * (np.atleast_2d(fractions) * energy / omega)
        if detection is DetectionKind.HOLEVO:
            return g(received).sum(axis=1)
        return shannon_term(received, detection.xi).sum(axis=1)

    grid = _simplex_grid(n, max(1, grid_steps))
    values = objective(grid)
    best_idx = int(np.argmax(values))
    best, best_val = grid[best_idx].copy(), float(values[best_idx])

    pairs = list(itertools.permutations(range(n), 2))
    step = 1.0 / max(1, grid_steps)
    while pairs and step > 1e-16:
        cands = []
        for i, j in pairs:
            t = min(step, best[j])
            if t <= 0:
                continue
            c = best.copy()
            c[i] += t
            c[j] -= t
            cands.append(c)
        if cands:
            cands = np.array(cands)
            vals = objective(cands)
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best, best_val = cands[k], float(vals[k])
                continue
        step *= 0.5

    photons = best * energy / omega
    alloc = Allocation(
        photons, math.nan, float(np.sum(omega * photons)), detection,
        int(np.count_nonzero(photons)),
    )
    return RateResult(best_val, RateUnit.BITS_PER_USE, detection, alloc)
