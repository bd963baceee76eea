"""``bosonic-capacity`` command line: capacity, power sweeps and spectra as CSV.

Exit codes: 0 success, 1 configuration or usage error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import enum
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .allocator import capacity
from .channel import (
    HBAR,
    FarFieldGeometry,
    FlatGrid,
    FlatProfile,
    ModeSet,
    ResourceBudget,
    mode_set,
    reference_power,
)
from .closedform import farfield_solution, flat_broadband_rate, spectrum
from .config import RUN_KEYS, RunConfig, as_float, load_config
from .errors import CapacityError, ConfigError, ProfileMismatch, SolverError
from .kernels import DetectionKind
from .numerics import default_tolerance

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2

_ALL = (DetectionKind.HOLEVO, DetectionKind.HETERODYNE, DetectionKind.HOMODYNE)
_BUDGET_KEYS = ("power_ratio", "power_watts", "energy_j")


class SweepQuantity(enum.Enum):
    POWER_RATIO = "power-ratio"
    POWER = "power"
    ENERGY = "energy"


class SweepScale(enum.Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class SweepSpec:
    quantity: SweepQuantity
    start: float
    stop: float
    points: int
    scale: SweepScale = SweepScale.LINEAR

    def __post_init__(self):
        if not self.start < self.stop:
            raise ConfigError("from", f"sweep needs from < to, got {self.start} >= {self.stop}")
        if self.points < 2:
            raise ConfigError("points", "sweep needs at least 2 points")
        if self.scale is SweepScale.LOG and not self.start > 0:
            raise ConfigError("from", "log sweep needs from > 0")

    def values(self) -> np.ndarray:
        if self.scale is SweepScale.LOG:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("arguments", message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--detection", help="holevo, het, hom or all")
    budget = common.add_argument_group("budget")
    budget.add_argument("--power-ratio", type=float, dest="power_ratio", help="P/P0 (far field)")
    budget.add_argument("--power-watts", type=float, dest="power_watts")
    budget.add_argument("--time-s", type=float, dest="time_s")
    budget.add_argument("--energy-j", type=float, dest="energy_j", help="energy per use")
    sweep = common.add_argument_group("sweep")
    sweep.add_argument("--from", type=float, dest="from")
    sweep.add_argument("--to", type=float, dest="to")
    sweep.add_argument("--points", type=int)
    sweep.add_argument("--log", action="store_const", const=True, default=None)
    sweep.add_argument("--quantity", choices=[q.value for q in SweepQuantity])
    common.add_argument("--n-points", type=int, dest="n_points")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--plot-script", metavar="PATH", dest="plot_script")
    common.add_argument("--si", action="store_const", const=True, default=None)

    parser = _Parser(
        prog="bosonic-capacity",
        description="Classical capacity of multimode lossy bosonic channels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("capacity", parents=[common], help="capacity at one budget")
    sub.add_parser("sweep", parents=[common], help="rates over a range of budgets")
    sub.add_parser("spectrum", parents=[common], help="optimal power spectrum")
    return parser


# -- problem set-up ---------------------------------------------------------

@dataclass(frozen=True)
class _Channel:
    kind: str                          # farfield | flat | discrete
    model: object
    modes: ModeSet | FlatGrid | None = None
    omega_ref: float = 1.0             # rad/s per normalized frequency unit
    natural_time: float | None = None  # 2 pi / delta_omega for flat grids


def _resolve_channel(cfg: RunConfig) -> _Channel:
    model = cfg.model
    profile = model.profile
    if isinstance(profile, FarFieldGeometry):
        return _Channel("farfield", model, omega_ref=profile.omega_c)
    if isinstance(profile, FlatProfile):
        if model.grid is None:
            return _Channel("flat", model)
        dw = model.grid.delta_omega
        if model.grid.n_modes is None:
            return _Channel("discrete", model, FlatGrid(profile.eta, 1.0), dw, 2 * math.pi / dw)
        ref = dw * model.grid.n_modes
        return _Channel("discrete", model, mode_set(model).scaled(ref), ref, 2 * math.pi / dw)
    try:
        ms = mode_set(model, *((model.grid.delta_omega, model.grid.n_modes) if model.grid else ()))
    except ProfileMismatch as exc:
        raise ConfigError("delta_omega", str(exc)) from None
    ref = float(ms.omega[-1])
    return _Channel("discrete", model, ms.scaled(ref), ref)


def _merge_settings(args: argparse.Namespace, cfg: RunConfig) -> dict:
    settings = dict(cfg.settings)
    flags = {k: getattr(args, k, None) for k in RUN_KEYS}
    if any(flags[k] is not None for k in _BUDGET_KEYS):
        for k in _BUDGET_KEYS:
            settings.pop(k, None)
    settings.update({k: v for k, v in flags.items() if v is not None})
    return settings


def _detections(settings: dict, default: str) -> tuple[DetectionKind, ...]:
    text = str(settings.get("detection", default)).strip().lower()
    if text == "all":
        return _ALL
    try:
        return tuple(DetectionKind.parse(part) for part in text.split(","))
    except CapacityError:
        raise ConfigError("detection", f"expected holevo, het, hom or all, got {text!r}") from None


def _float_setting(settings, key):
    value = settings.get(key)
    if value is None:
        return None
    return as_float(value, key)


def _int_setting(settings, key, default):
    value = settings.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    return value


def _budget_count(settings):
    given = [k for k in _BUDGET_KEYS if settings.get(k) is not None]
    if len(given) > 1:
        raise ConfigError(given[1], f"conflicts with {given[0]}; give exactly one budget")
    if not given:
        raise ConfigError("power_ratio", "no budget given (power_ratio, power_watts or energy_j)")
    return given[0]


def _farfield_ratio(ch: _Channel, settings: dict) -> float:
    key = _budget_count(settings)
    if key == "power_ratio":
        return _float_setting(settings, "power_ratio")
    p0 = reference_power(ch.model.profile)
    if key == "power_watts":
        return _float_setting(settings, "power_watts") / p0
    time = _float_setting(settings, "time_s")
    if time is None:
        raise ConfigError("time_s", "energy_j on a far-field channel needs time_s")
    return _float_setting(settings, "energy_j") / time / p0


def _flat_power(settings: dict) -> float:
    key = _budget_count(settings)
    if key == "power_ratio":
        raise ConfigError("power_ratio", "only applies to farfield profiles")
    if key == "power_watts":
        return _float_setting(settings, "power_watts")
    time = _float_setting(settings, "time_s")
    if time is None:
        raise ConfigError("time_s", "energy_j on a flat continuum channel needs time_s")
    return _float_setting(settings, "energy_j") / time


def _use_time(ch: _Channel, settings: dict) -> float | None:
    time = _float_setting(settings, "time_s")
    return time if time is not None else ch.natural_time


def _discrete_energy(ch: _Channel, settings: dict) -> float:
    """Energy per use in units of hbar * omega_ref."""
    key = _budget_count(settings)
    if key == "power_ratio":
        raise ConfigError("power_ratio", "only applies to farfield profiles")
    if key == "energy_j":
        joules = _float_setting(settings, "energy_j")
    else:
        time = _use_time(ch, settings)
        if time is None:
            raise ConfigError("time_s", "power_watts on a tabulated channel needs time_s")
        joules = _float_setting(settings, "power_watts") * time
    return joules / (HBAR * ch.omega_ref)


# -- output -----------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.16e}"


def _header(command: str, cfg: RunConfig, extra: list[str]) -> list[str]:
    tol = default_tolerance()
    lines = [
        f"# bosonic-capacity {__version__}",
        f"# command={command}",
        f"# config_sha256={cfg.sha256}",
        f"# rel_tol={tol.rel:.3e} abs_tol={tol.abs:.3e} beta_rel_tol=1.000e-15",
        f"# backend={_backend.name}",
    ]
    return lines + [f"# {line}" for line in extra]


def _emit(text: str, settings: dict, stdout) -> None:
    out = settings.get("out")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


_PLOT_TEMPLATE = '''"""Plot {csv} (written by bosonic-capacity {command})."""
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

CSV = Path({csv!r})
lines = [ln for ln in CSV.read_text().splitlines() if ln and not ln.startswith("#")]
names = lines[0].split(",")
data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)

fig, ax = plt.subplots()
for i, name in enumerate(names[1:], start=1):
    ax.plot(data[:, 0], data[:, i], label=name)
ax.set_xlabel(names[0])
ax.set_xscale({xscale!r})
ax.legend()
fig.savefig(CSV.with_suffix(".png"), dpi=150)
'''


def _write_plot_script(settings: dict, command: str, log_x: bool) -> None:
    target = settings.get("plot_script")
    if not target:
        return
    if not settings.get("out"):
        raise ConfigError("out", "--plot-script needs --out so the script can find the CSV")
    Path(target).write_text(
        _PLOT_TEMPLATE.format(
            csv=str(Path(settings["out"]).resolve()),
            command=command,
            xscale="log" if log_x else "linear",
        ),
        encoding="utf-8",
    )


# -- commands ---------------------------------------------------------------

def _farfield_point(ch, ratio, kind, tol, si):
    sol = farfield_solution(ratio, kind, tol)
    geometry = ch.model.profile
    value = sol.rate_normalized * (geometry.omega_c / (2 * math.pi) if si else 1.0)
    return sol, value


def cmd_capacity(args, cfg: RunConfig, stdout=sys.stdout) -> int:
    settings = _merge_settings(args, cfg)
    ch = _resolve_channel(cfg)
    si = bool(settings.get("si"))
    tol = default_tolerance()
    rows = []
    if ch.kind == "farfield":
        ratio = _farfield_ratio(ch, settings)
        time = _float_setting(settings, "time_s")
        geometry = ch.model.profile
        unit = "bits_per_sec" if si else "bits_per_omega_c_T_over_2pi"
        for kind in _detections(settings, "holevo"):
            sol, value = _farfield_point(ch, ratio, kind, tol, si)
            cut = sol.omega_cut
            if cut is not None and si:
                cut *= geometry.omega_c
            active = None
            if time is not None:
                fraction = 1.0 if cut is None else 1.0 - 1.0 / sol.y0
                active = int(geometry.omega_c * time / (2 * math.pi) * fraction)
            rows.append((kind.value, value, unit, None, sol.y0, cut, active))
        extra = [f"power_ratio={_fmt(ratio)}",
                 "omega_cut unit=" + ("rad/s" if si else "omega_c")]
    elif ch.kind == "flat":
        kinds = _detections(settings, "holevo")
        if kinds != (DetectionKind.HOLEVO,):
            raise ConfigError(
                "detection", "flat continuum has a closed form for holevo only; set delta_omega"
            )
        power = _flat_power(settings)
        time = _float_setting(settings, "time_s")
        per_sec = flat_broadband_rate(ch.model.profile.eta, power)
        if si or time is None:
            rows.append(("holevo", per_sec, "bits_per_sec", None, None, None, None))
        else:
            rows.append(("holevo", per_sec * time, "bits_per_use", None, None, None, None))
        extra = [f"power_watts={_fmt(power)}"]
    else:
        energy = _discrete_energy(ch, settings)
        time = _use_time(ch, settings)
        if si and time is None:
            raise ConfigError("time_s", "--si on a tabulated channel needs time_s")
        for kind in _detections(settings, "holevo"):
            res = capacity(ch.modes, ResourceBudget(energy), kind)
            alloc = res.allocation
            value, unit = res.value, "bits_per_use"
            beta = alloc.beta
            if si:
                value, unit = value / time, "bits_per_sec"
                beta = beta / (HBAR * ch.omega_ref)
            rows.append((kind.value, value, unit, beta, None, None, alloc.active_modes))
        extra = [f"energy_per_use={_fmt(energy)} hbar*omega_ref",
                 f"omega_ref_rad_s={_fmt(ch.omega_ref)}",
                 "beta unit=" + ("1/J" if si else "1/(hbar*omega_ref)")]

    buf = io.StringIO()
    for line in _header("capacity", cfg, extra):
        buf.write(line + "\n")
    buf.write("detection,rate,unit,beta,y0,omega_cut,active_modes\n")
    for kind, value, unit, beta, y0, cut, active in rows:
        fields = [kind, _fmt(value), unit, _fmt(beta), _fmt(y0), _fmt(cut), _fmt(active)]
        buf.write(",".join(fields) + "\n")
    _emit(buf.getvalue(), settings, stdout)
    _write_plot_script(settings, "capacity", False)
    return EXIT_OK


def _sweep_spec(settings: dict, default_quantity: SweepQuantity) -> SweepSpec:
    for key in ("from", "to"):
        if settings.get(key) is None:
            raise ConfigError(key, "sweep needs from and to")
    quantity = settings.get("quantity")
    try:
        quantity = SweepQuantity(quantity) if quantity else default_quantity
    except ValueError:
        raise ConfigError("quantity", f"unknown sweep quantity {quantity!r}") from None
    return SweepSpec(
        quantity,
        _float_setting(settings, "from"),
        _float_setting(settings, "to"),
        _int_setting(settings, "points", 50),
        SweepScale.LOG if settings.get("log") else SweepScale.LINEAR,
    )


def cmd_sweep(args, cfg: RunConfig, stdout=sys.stdout) -> int:
    settings = _merge_settings(args, cfg)
    ch = _resolve_channel(cfg)
    si = bool(settings.get("si"))
    tol = default_tolerance()

    if ch.kind == "farfield":
        spec = _sweep_spec(settings, SweepQuantity.POWER_RATIO)
        kinds = _detections(settings, "all")
        p0 = reference_power(ch.model.profile)
        if spec.quantity is SweepQuantity.POWER_RATIO:
            first, ratios = "power_ratio", spec.values()
        elif spec.quantity is SweepQuantity.POWER:
            first, ratios = "power_w", spec.values() / p0
        else:
            raise ConfigError("quantity", "far-field sweeps run over power-ratio or power")
        columns = [f"{k.value}_bits_per_sec" for k in kinds]
        rows = []
        for x, ratio in zip(spec.values(), ratios):
            rows.append([x] + [_farfield_point(ch, ratio, k, tol, si)[1] for k in kinds])
        extra = ["rate unit=" + ("bits/s" if si else "bits per omega_c*T/(2*pi)"),
                 f"P0_watts={_fmt(p0)}"]
    elif ch.kind == "flat":
        spec = _sweep_spec(settings, SweepQuantity.POWER)
        kinds = _detections(settings, "holevo")
        if kinds != (DetectionKind.HOLEVO,):
            raise ConfigError(
                "detection", "flat continuum has a closed form for holevo only; set delta_omega"
            )
        if spec.quantity is not SweepQuantity.POWER:
            raise ConfigError("quantity", "flat continuum sweeps run over power")
        eta = ch.model.profile.eta
        first, columns = "power_w", ["holevo_bits_per_sec"]
        rows = [[p, flat_broadband_rate(eta, p)] for p in spec.values()]
        extra = ["rate unit=bits/s"]
    else:
        spec = _sweep_spec(settings, SweepQuantity.ENERGY)
        kinds = _detections(settings, "all")
        values = spec.values()
        if spec.quantity is SweepQuantity.ENERGY:
            first = "energy_j" if si else "energy_norm"
            energies = values / (HBAR * ch.omega_ref) if si else values
        elif spec.quantity is SweepQuantity.POWER:
            time = _use_time(ch, settings)
            if time is None:
                raise ConfigError("time_s", "power sweep on a tabulated channel needs time_s")
            first, energies = "power_w", values * time / (HBAR * ch.omega_ref)
        else:
            raise ConfigError("quantity", "power-ratio sweeps need a farfield profile")
        columns = [f"{k.value}_bits_per_use" for k in kinds]
        rows = [[x] + [capacity(ch.modes, ResourceBudget(e), k).value for k in kinds]
                for x, e in zip(values, energies)]
        extra = ["rate unit=bits per use", f"omega_ref_rad_s={_fmt(ch.omega_ref)}"]

    buf = io.StringIO()
    sweep_line = (f"sweep quantity={spec.quantity.value} from={_fmt(spec.start)} "
                  f"to={_fmt(spec.stop)} points={spec.points} scale={spec.scale.value}")
    for line in _header("sweep", cfg, [sweep_line] + extra):
        buf.write(line + "\n")
    buf.write(",".join([first] + columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    _emit(buf.getvalue(), settings, stdout)
    _write_plot_script(settings, "sweep", spec.scale is SweepScale.LOG)
    return EXIT_OK


def _subsample(n_total: int, n_points: int) -> np.ndarray:
    if n_total <= n_points:
        return np.arange(n_total)
    return np.unique(np.round(np.linspace(0, n_total - 1, n_points)).astype(int))


def cmd_spectrum(args, cfg: RunConfig, stdout=sys.stdout) -> int:
    settings = _merge_settings(args, cfg)
    ch = _resolve_channel(cfg)
    si = bool(settings.get("si"))
    n_points = _int_setting(settings, "n_points", 200)
    if n_points < 1:
        raise ConfigError("n_points", "must be >= 1")
    tol = default_tolerance()
    kinds = _detections(settings, "all")

    if ch.kind == "farfield":
        geometry = ch.model.profile
        ratio = _farfield_ratio(ch, settings)
        extra = [f"power_ratio={_fmt(ratio)}"]
        cols = []
        for kind in kinds:
            sol = farfield_solution(ratio, kind, tol)
            u, s = spectrum(sol, n_points)
            cols.append(s)
            line = f"{kind.value} y0={_fmt(sol.y0)}"
            if sol.omega_cut is not None:
                line += f" omega0_over_omega_c={_fmt(sol.omega_cut)}"
            extra.append(line)
        x = u
        if si:
            x = u * geometry.omega_c
            cols = [c * geometry.omega_c / geometry.fresnel_at_cutoff for c in cols]
        extra.append("S normalization: integrates over omega/omega_c to P/P0")
    elif ch.kind == "flat":
        raise ConfigError("delta_omega", "spectrum of a flat channel needs a mode grid")
    else:
        energy = _discrete_energy(ch, settings)
        allocs = [capacity(ch.modes, ResourceBudget(energy), k).allocation for k in kinds]
        n_total = max(a.photon_numbers.size for a in allocs)
        if isinstance(ch.modes, FlatGrid):
            omega = ch.modes.modes(n_total).omega
        else:
            omega = ch.modes.omega
        cols = []
        for a in allocs:
            photons = np.zeros(n_total)
            photons[: a.photon_numbers.size] = a.photon_numbers
            cols.append(omega * photons)
        idx = _subsample(n_total, n_points)
        x = omega[idx]
        cols = [c[idx] for c in cols]
        if si:
            x = x * ch.omega_ref
            cols = [c * ch.omega_ref for c in cols]
        extra = [f"energy_per_use={_fmt(energy)} hbar*omega_ref",
                 f"omega_ref_rad_s={_fmt(ch.omega_ref)}"]

    first = "omega_rad_s" if si else "omega_over_omega_c"
    s_name = "S_rad_s" if si else "S_normalized"
    names = [s_name] if len(kinds) == 1 else [f"{k.value}_{s_name}" for k in kinds]
    buf = io.StringIO()
    for line in _header("spectrum", cfg, extra):
        buf.write(line + "\n")
    buf.write(",".join([first] + names) + "\n")
    for i in range(len(x)):
        buf.write(",".join([_fmt(x[i])] + [_fmt(c[i]) for c in cols]) + "\n")
    _emit(buf.getvalue(), settings, stdout)
    _write_plot_script(settings, "spectrum", False)
    return EXIT_OK


_COMMANDS = {"capacity": cmd_capacity, "sweep": cmd_sweep, "spectrum": cmd_spectrum}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not args.config:
            raise ConfigError("config", "a channel configuration file is required (--config)")
        cfg = load_config(args.config)
        return _COMMANDS[args.command](args, cfg, stdout)
    except SolverError as exc:
        stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER
    except (CapacityError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
