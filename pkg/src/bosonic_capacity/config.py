"""Channel configuration files (YAML or JSON key/value documents).

Channel keys::

    profile        flat | farfield | tabulated
    eta            flat transmissivity
    area_t_m2, area_r_m2, path_len_m, omega_c_rad_s    far-field geometry
    modes          list of [omega, eta] pairs (tabulated)
    delta_omega    mode spacing in rad/s
    n_modes        number of modes on the grid

Any CLI flag may also be given as a key (``detection``, ``power_ratio``,
``power_watts``, ``time_s``, ``energy_j``, ``from``, ``to``, ``points``,
``log``, ``n_points``, ``quantity``, ``si``, ``out``, ``plot_script``).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .channel import (
    ChannelModel,
    FarFieldGeometry,
    FlatProfile,
    ModeGrid,
    ModeSpec,
    TabulatedProfile,
)
from .errors import CapacityError, ConfigError

__all__ = ["RunConfig", "as_float", "CHANNEL_KEYS", "RUN_KEYS", "parse_config", "load_config"]

CHANNEL_KEYS = {
    "profile", "eta", "area_t_m2", "area_r_m2", "path_len_m", "omega_c_rad_s",
    "modes", "delta_omega", "n_modes",
}
RUN_KEYS = {
    "detection", "power_ratio", "power_watts", "time_s", "energy_j", "from", "to",
    "points", "log", "n_points", "quantity", "si", "out", "plot_script",
}
_PROFILE_KEYS = {
    "flat": {"eta", "delta_omega", "n_modes"},
    "farfield": {"area_t_m2", "area_r_m2", "path_len_m", "omega_c_rad_s",
                 "delta_omega", "n_modes"},
    "tabulated": {"modes", "delta_omega", "n_modes"},
}


@dataclass(frozen=True)
class RunConfig:
    model: ChannelModel
    settings: dict = field(default_factory=dict)
    sha256: str = ""


def _number(raw: Mapping, key: str, *, positive=False, unit_interval=False) -> float:
    value = as_float(raw[key], key)
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    if positive and not value > 0:
        raise ConfigError(key, f"must be > 0, got {value}")
    if unit_interval and not 0.0 <= value <= 1.0:
        raise ConfigError(key, f"must lie in [0, 1], got {value}")
    return value


def as_float(value, key: str) -> float:
    """Coerce a config value to float; YAML 1.1 reads ``1.0e15`` as a string."""
    if isinstance(value, bool):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(key, f"expected a number, got {value!r}")


def _integer(raw: Mapping, key: str) -> int:
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(key, f"expected a positive integer, got {value!r}")
    return value


def _grid(raw: Mapping) -> ModeGrid | None:
    if "n_modes" in raw and "delta_omega" not in raw:
        raise ConfigError("delta_omega", "required when n_modes is given")
    if "delta_omega" not in raw:
        return None
    n_modes = _integer(raw, "n_modes") if "n_modes" in raw else None
    return ModeGrid(_number(raw, "delta_omega", positive=True), n_modes)


def _modes(raw: Mapping) -> tuple[ModeSpec, ...]:
    entries = raw["modes"]
    if not isinstance(entries, list) or not entries:
        raise ConfigError("modes", "expected a non-empty list of [omega, eta] pairs")
    modes = []
    for i, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError("modes", f"entry {i} is not an [omega, eta] pair: {pair!r}")
        try:
            modes.append(ModeSpec(as_float(pair[0], "modes"), as_float(pair[1], "modes")))
        except CapacityError as exc:
            raise ConfigError("modes", f"entry {i}: {exc}") from None
    return tuple(modes)


def parse_config(raw: Any) -> tuple[ChannelModel, dict]:
    """Validate a decoded config mapping; errors name the offending key."""
    if not isinstance(raw, Mapping):
        raise ConfigError("profile", "config must be a mapping of keys to values")
    unknown = sorted(set(raw) - CHANNEL_KEYS - RUN_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    if "profile" not in raw:
        raise ConfigError("profile", "missing required key")
    profile = raw["profile"]
    if profile not in _PROFILE_KEYS:
        raise ConfigError("profile", f"expected flat, farfield or tabulated, got {profile!r}")
    stray = sorted((set(raw) & CHANNEL_KEYS) - {"profile"} - _PROFILE_KEYS[profile])
    if stray:
        raise ConfigError(stray[0], f"not used by the {profile} profile")

    if profile == "flat":
        if "eta" not in raw:
            raise ConfigError("eta", "missing required key")
        model = ChannelModel(FlatProfile(_number(raw, "eta", unit_interval=True)), _grid(raw))
    elif profile == "farfield":
        for key in ("area_t_m2", "area_r_m2", "path_len_m", "omega_c_rad_s"):
            if key not in raw:
                raise ConfigError(key, "missing required key")
        values = {k: _number(raw, k, positive=True)
                  for k in ("area_t_m2", "area_r_m2", "path_len_m", "omega_c_rad_s")}
        try:
            geometry = FarFieldGeometry(
                values["area_t_m2"], values["area_r_m2"],
                values["path_len_m"], values["omega_c_rad_s"],
            )
        except CapacityError as exc:
            raise ConfigError("omega_c_rad_s", str(exc)) from None
        model = ChannelModel(geometry, _grid(raw))
    else:
        if "modes" not in raw:
            raise ConfigError("modes", "missing required key")
        modes = _modes(raw)
        try:
            tab = TabulatedProfile(modes)
        except CapacityError as exc:
            raise ConfigError("modes", str(exc)) from None
        model = ChannelModel(tab, _grid(raw))

    settings = {k: raw[k] for k in RUN_KEYS if k in raw}
    return model, settings


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(data.decode("utf-8"))
    except (yaml.YAMLError, UnicodeDecodeError) as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    model, settings = parse_config(raw)
    return RunConfig(model, settings, hashlib.sha256(data).hexdigest())
