"""Channel descriptions: per-mode transmissivity profiles and the energy budget.

Physical inputs are SI.  The solvers work with hbar = 1 and frequencies in a
reference unit (the mode spacing for flat channels, the cutoff ``omega_c``
for far-field ones); :meth:`ResourceBudget.normalized` and
:meth:`ModeSet.scaled` do the conversion at the boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    DomainError,
    FarFieldInvalidWarning,
    ProfileMismatch,
    TransmissivityClampWarning,
)

__all__ = [
    "HBAR",
    "C_LIGHT",
    "FAR_FIELD_WARN",
    "ModeSpec",
    "ModeSet",
    "FlatGrid",
    "FlatProfile",
    "FarFieldGeometry",
    "TabulatedProfile",
    "ModeGrid",
    "ChannelModel",
    "ResourceBudget",
    "fresnel",
    "discretize",
    "mode_set",
    "reference_power",
]

HBAR = 6.62607015e-34 / (2.0 * math.pi)  # J s
C_LIGHT = 299_792_458.0  # m / s
FAR_FIELD_WARN = 0.1


@dataclass(frozen=True)
class ModeSpec:
    omega: float
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"mode frequency must be > 0, got {self.omega}")
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"transmissivity must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Array form of a finite list of modes, sorted by frequency."""

    omega: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        omega = np.ascontiguousarray(self.omega, dtype=float)
        eta = np.ascontiguousarray(self.eta, dtype=float)
        if omega.ndim != 1 or omega.shape != eta.shape:
            raise DomainError("omega and eta must be 1-d arrays of equal length")
        if omega.size == 0:
            raise DomainError("a channel needs at least one mode")
        if not np.all(np.isfinite(omega)) or np.any(omega <= 0):
            raise DomainError("mode frequencies must be finite and > 0")
        if np.any(eta < 0) or np.any(eta > 1):
            raise DomainError("transmissivities must lie in [0, 1]")
        omega.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "eta", eta)

    def __len__(self):
        return self.omega.size

    @classmethod
    def from_specs(cls, modes: Sequence[ModeSpec]) -> "ModeSet":
        return cls(
            np.array([m.omega for m in modes], dtype=float),
            np.array([m.eta for m in modes], dtype=float),
        )

    def to_specs(self) -> list[ModeSpec]:
        return [ModeSpec(float(w), float(e)) for w, e in zip(self.omega, self.eta)]

    def scaled(self, omega_unit: float) -> "ModeSet":
        """Same modes with frequencies expressed in units of ``omega_unit``."""
        return ModeSet(self.omega / omega_unit, self.eta)


@dataclass(frozen=True)
class FlatGrid:
    """Unbounded grid ``omega_k = k * delta_omega`` with constant transmissivity.

    The allocator truncates it where the occupation becomes negligible.
    """

    eta: float
    delta_omega: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"transmissivity must lie in [0, 1], got {self.eta}")
        if not self.delta_omega > 0:
            raise DomainError("delta_omega must be > 0")

    def modes(self, n_modes: int) -> ModeSet:
        k = np.arange(1, n_modes + 1, dtype=float)
        return ModeSet(k * self.delta_omega, np.full(n_modes, self.eta))


@dataclass(frozen=True)
class FlatProfile:
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"flat transmissivity must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class FarFieldGeometry:
    """Two circular apertures a distance ``path_len`` apart (SI units)."""

    area_t: float
    area_r: float
    path_len: float
    omega_c: float

    def __post_init__(self):
        for name in ("area_t", "area_r", "path_len", "omega_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value}")
        d_c = self.fresnel_at_cutoff
        if d_c >= 1.0:
            raise DomainError(
                f"Fresnel number at cutoff is {d_c:.3g}; far-field model needs D(omega_c) < 1"
            )
        if d_c > FAR_FIELD_WARN:
            warnings.warn(
                f"D(omega_c) = {d_c:.3g} is not << 1; far-field results are unreliable",
                FarFieldInvalidWarning,
                stacklevel=3,
            )

    @property
    def fresnel_at_cutoff(self) -> float:
        return _fresnel_raw(self, self.omega_c)

    @property
    def far_field_valid(self) -> bool:
        return self.fresnel_at_cutoff <= FAR_FIELD_WARN


@dataclass(frozen=True)
class TabulatedProfile:
    modes: tuple[ModeSpec, ...]

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise DomainError("tabulated profile needs at least one mode")
        omegas = [m.omega for m in modes]
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise DomainError("tabulated modes must have strictly increasing omega")
        object.__setattr__(self, "modes", modes)


@dataclass(frozen=True)
class ModeGrid:
    delta_omega: float
    n_modes: int | None = None

    def __post_init__(self):
        if not self.delta_omega > 0:
            raise DomainError("delta_omega must be > 0")
        if self.n_modes is not None and self.n_modes < 1:
            raise DomainError("n_modes must be >= 1")


Profile = Union[FlatProfile, FarFieldGeometry, TabulatedProfile]


@dataclass(frozen=True)
class ChannelModel:
    profile: Profile
    grid: ModeGrid | None = None

    @property
    def kind(self) -> str:
        if isinstance(self.profile, FlatProfile):
            return "flat"
        if isinstance(self.profile, FarFieldGeometry):
            return "farfield"
        return "tabulated"


@dataclass(frozen=True)
class ResourceBudget:
    """Mean energy per channel use, optionally remembered as power x time."""

    energy: float
    power: float | None = field(default=None, compare=False)
    time: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.energy):
            raise DomainError("energy must be finite")

    @classmethod
    def energy_per_use(cls, energy: float) -> "ResourceBudget":
        return cls(float(energy))

    @classmethod
    def power_and_time(cls, power: float, time: float) -> "ResourceBudget":
        if not time > 0:
            raise DomainError("transmission time must be > 0")
        return cls(float(power) * float(time), float(power), float(time))

    def normalized(self, omega_unit: float, hbar: float = HBAR) -> "ResourceBudget":
        """Energy in units of ``hbar * omega_unit``."""
        return ResourceBudget(self.energy / (hbar * omega_unit))


def _fresnel_raw(geometry: FarFieldGeometry, omega):
    scale = omega / (2.0 * math.pi * C_LIGHT * geometry.path_len)
    return geometry.area_t * geometry.area_r * scale * scale


def fresnel(geometry: FarFieldGeometry, omega):
    """Fresnel number ``A_t A_r (omega / 2 pi c L)**2``, clamped to 1.

    ``omega`` may be an array.
    """
    arr = np.asarray(omega, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("omega must be > 0")
    d = _fresnel_raw(geometry, arr)
    if np.any(d > 1.0):
        warnings.warn(
            "Fresnel number exceeds 1 (near field); transmissivity clamped to 1",
            TransmissivityClampWarning,
            stacklevel=2,
        )
        d = np.minimum(d, 1.0)
    return float(d) if arr.ndim == 0 else d


def _transmissivity(profile: Profile, omega: np.ndarray) -> np.ndarray:
    if isinstance(profile, FlatProfile):
        return np.full(omega.shape, profile.eta)
    if isinstance(profile, FarFieldGeometry):
        return fresnel(profile, omega)
    raise ProfileMismatch("tabulated profiles carry their own modes")


def mode_set(
    model: ChannelModel,
    delta_omega: float | None = None,
    n_modes: int | None = None,
) -> ModeSet:
    """Array form of :func:`discretize`."""
    if isinstance(model.profile, TabulatedProfile):
        modes = ModeSet.from_specs(model.profile.modes)
        if delta_omega is not None or n_modes is not None:
            n = len(modes) if n_modes is None else n_modes
            dw = delta_omega if delta_omega is not None else modes.omega[0]
            expected = dw * np.arange(1, n + 1)
            if n != len(modes) or not np.allclose(modes.omega, expected, rtol=1e-12):
                raise ProfileMismatch(
                    "tabulated modes do not lie on the requested grid "
                    f"(delta_omega={dw}, n_modes={n})"
                )
        return modes
    grid = model.grid
    if delta_omega is None:
        delta_omega = grid.delta_omega if grid else None
    if n_modes is None:
        n_modes = grid.n_modes if grid else None
    if delta_omega is None or n_modes is None:
        raise DomainError("parametric profiles need delta_omega and n_modes to discretize")
    if not delta_omega > 0:
        raise DomainError("delta_omega must be > 0")
    if n_modes < 1:
        raise DomainError("n_modes must be >= 1")
    omega = delta_omega * np.arange(1, n_modes + 1, dtype=float)
    return ModeSet(omega, _transmissivity(model.profile, omega))


def discretize(
    model: ChannelModel,
    delta_omega: float | None = None,
    n_modes: int | None = None,
) -> list[ModeSpec]:
    """Modes ``omega_k = k * delta_omega`` (k = 1..n_modes) with profile transmissivity.

    Tabulated models return their own modes; passing a grid they do not
    lie on raises :class:`ProfileMismatch`.
    """
    return mode_set(model, delta_omega, n_modes).to_specs()


def reference_power(geometry: FarFieldGeometry) -> float:
    """Far-field reference power ``2 pi hbar c^2 L^2 / (A_t A_r)`` in watts."""
    p0 = 2.0 * math.pi * HBAR * C_LIGHT**2 * geometry.path_len**2 / (
        geometry.area_t * geometry.area_r
    )
    via_cutoff = HBAR * geometry.omega_c**2 / (2.0 * math.pi * geometry.fresnel_at_cutoff)
    if not math.isclose(p0, via_cutoff, rel_tol=1e-12):
        raise ArithmeticError(f"reference power identity violated: {p0} vs {via_cutoff}")
    return p0
