"""Configuration-driven parameter sweeps with deterministic export.

Configs are INI files; see docs/schemas.md for the sections, keys, and the
per-mode CSV schemas. Grid points are independent tasks executed either in
process or on a fork pool; every row is computed by the same pure function
and placed into a slot pre-indexed by grid position, so output bytes do not
depend on the worker count or on scheduling order.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from . import fluctuations, meanfield, quantum
from ._version import __version__
from .errors import ConfigError, NoStableSolution, SrlabError
from .params import BranchLabel, ModelParams, PhaseLabel

MODES = ("meanfield-map", "fluctuation-map", "switching-curve",
         "quantum-curve", "wigner", "stability-map", "lambda-sweep")

AXIS_NAMES = ("lambda", "g_drive", "delta", "kappa", "n_atoms")

# axis-count contract per mode
_MODE_AXES = {
    "meanfield-map": (2,),
    "fluctuation-map": (1, 2),
    "switching-curve": (1,),
    "quantum-curve": (1, 2),
    "wigner": (0,),
    "stability-map": (2,),
    "lambda-sweep": (1, 2),
}

_SECTION_KEYS = {
    "sweep": {"mode", "label", "workers"},
    "params": {"kappa", "delta", "delta_c", "delta_a", "lambda", "coupling",
               "g_drive", "gamma", "n_atoms"},
    "axis1": {"name", "min", "max", "points", "values"},
    "axis2": {"name", "min", "max", "points", "values"},
    "quantum": {"fock_cutoff"},
    "wigner": {"half_width", "points"},
    "solver": {"rtol", "atol"},
}

_BRANCH_PREFIXES = (
    ("np_down", BranchLabel.NP_DOWN),
    ("np_up", BranchLabel.NP_UP),
    ("sp_plus", BranchLabel.SP_PLUS_POS),
    ("sp_minus", BranchLabel.SP_MINUS_POS),
)


@dataclass(frozen=True)
class AxisSpec:
    name: str
    values: tuple

    @property
    def points(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    base: ModelParams
    axes: tuple
    fock_cutoff: int = quantum.DEFAULT_FOCK_CUTOFF
    wigner_half_width: float = quantum.DEFAULT_GRID_HALFWIDTH
    wigner_points: int = quantum.DEFAULT_GRID_POINTS
    workers: int | None = None
    label: str = ""
    solver_rtol: float | None = None
    solver_atol: float | None = None


def _get_float(cp, section, option):
    try:
        return cp.getfloat(section, option)
    except ValueError as exc:
        raise ConfigError(f"{option} in [{section}] is not a number: {exc}",
                          section=section, option=option) from None


def _get_int(cp, section, option):
    try:
        return cp.getint(section, option)
    except ValueError as exc:
        raise ConfigError(f"{option} in [{section}] is not an integer: {exc}",
                          section=section, option=option) from None


def _parse_axis(cp, section) -> AxisSpec:
    name = cp.get(section, "name", fallback=None)
    if name is None:
        raise ConfigError(f"[{section}] needs a name", section=section,
                          option="name")
    name = name.strip()
    if name == "coupling":
        name = "lambda"
    if name not in AXIS_NAMES:
        raise ConfigError(
            f"unknown axis name {name!r}; choose from {AXIS_NAMES}",
            section=section, option="name")
    has_range = any(cp.has_option(section, k) for k in ("min", "max",
                                                        "points"))
    has_values = cp.has_option(section, "values")
    if has_range and has_values:
        raise ConfigError(f"[{section}] mixes min/max/points with values",
                          section=section)
    if has_values:
        raw = cp.get(section, "values")
        try:
            vals = tuple(float(tok) for tok in raw.split(",") if tok.strip())
        except ValueError:
            raise ConfigError(f"values in [{section}] must be a comma list "
                              "of numbers", section=section,
                              option="values") from None
    elif has_range:
        for k in ("min", "max", "points"):
            if not cp.has_option(section, k):
                raise ConfigError(f"[{section}] is missing {k}",
                                  section=section, option=k)
        lo = _get_float(cp, section, "min")
        hi = _get_float(cp, section, "max")
        pts = _get_int(cp, section, "points")
        vals = tuple(float(v) for v in np.linspace(lo, hi, pts))
    else:
        raise ConfigError(f"[{section}] needs min/max/points or values",
                          section=section)
    if len(vals) < 2:
        raise ConfigError(f"[{section}] needs at least 2 points",
                          section=section)
    if name == "n_atoms":
        for v in vals:
            if not float(v).is_integer() or v < 1:
                raise ConfigError("n_atoms axis values must be positive "
                                  "integers", section=section,
                                  option="values")
    return AxisSpec(name=name, values=vals)


def parse_config(path: str, mode: str | None = None) -> SweepConfig:
    """Read and validate a sweep config file.

    `mode` is the CLI subcommand; when the file also carries one they must
    agree. Raises ConfigError with section/option diagnostics on any
    problem.
    """
    cp = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from None

    for section in cp.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]", section=section)
        for option in cp.options(section):
            if option not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key {option!r} in [{section}]",
                                  section=section, option=option)

    file_mode = cp.get("sweep", "mode", fallback=None)
    if file_mode is not None:
        file_mode = file_mode.strip()
    if mode is None:
        mode = file_mode
    elif file_mode is not None and file_mode != mode:
        raise ConfigError(f"config file says mode={file_mode} but the "
                          f"command line asked for {mode}",
                          section="sweep", option="mode")
    if mode is None:
        raise ConfigError("no mode given (neither command line nor [sweep])",
                          section="sweep", option="mode")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; choose from {MODES}",
                          section="sweep", option="mode")

    if not cp.has_section("params"):
        raise ConfigError("missing [params] section", section="params")
    if cp.has_option("params", "lambda") and cp.has_option("params",
                                                           "coupling"):
        raise ConfigError("give either lambda or coupling, not both",
                          section="params")
    if cp.has_option("params", "delta") and (
            cp.has_option("params", "delta_c")
            or cp.has_option("params", "delta_a")):
        raise ConfigError("give either delta or delta_c/delta_a, not both",
                          section="params")

    def param(*names, required=True, default=None):
        for nm in names:
            if cp.has_option("params", nm):
                return _get_float(cp, "params", nm)
        if required:
            raise ConfigError(f"[params] is missing {names[0]}",
                              section="params", option=names[0])
        return default

    kappa = param("kappa")
    coupling = param("lambda", "coupling")
    g_drive = param("g_drive")
    if cp.has_option("params", "delta"):
        delta_c = delta_a = _get_float(cp, "params", "delta")
    else:
        delta_c = param("delta_c")
        delta_a = param("delta_a")
    gamma = param("gamma", required=False, default=0.001)
    n_atoms = _get_int(cp, "params", "n_atoms") \
        if cp.has_option("params", "n_atoms") else 4
    try:
        base = ModelParams(delta_c=delta_c, delta_a=delta_a,
                           coupling=coupling, g_drive=g_drive, kappa=kappa,
                           gamma=gamma, n_atoms=n_atoms)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid [params]: {exc}",
                          section="params") from None

    axes = []
    if cp.has_section("axis2") and not cp.has_section("axis1"):
        raise ConfigError("[axis2] given without [axis1]", section="axis2")
    for section in ("axis1", "axis2"):
        if cp.has_section(section):
            axes.append(_parse_axis(cp, section))
    allowed = _MODE_AXES[mode]
    if len(axes) not in allowed:
        raise ConfigError(f"mode {mode} takes {allowed} axes, config has "
                          f"{len(axes)}", section="axis1")
    if mode == "lambda-sweep" and axes[0].name != "lambda":
        raise ConfigError("lambda-sweep requires axis1 name = lambda",
                          section="axis1", option="name")

    fock_cutoff = quantum.DEFAULT_FOCK_CUTOFF
    if cp.has_option("quantum", "fock_cutoff"):
        fock_cutoff = _get_int(cp, "quantum", "fock_cutoff")
        if fock_cutoff < 1:
            raise ConfigError("fock_cutoff must be >= 1", section="quantum",
                              option="fock_cutoff")

    half_width = quantum.DEFAULT_GRID_HALFWIDTH
    wpoints = quantum.DEFAULT_GRID_POINTS
    if cp.has_option("wigner", "half_width"):
        half_width = _get_float(cp, "wigner", "half_width")
        if half_width <= 0:
            raise ConfigError("half_width must be positive",
                              section="wigner", option="half_width")
    if cp.has_option("wigner", "points"):
        wpoints = _get_int(cp, "wigner", "points")
        if wpoints < 2:
            raise ConfigError("wigner points must be >= 2", section="wigner",
                              option="points")

    workers = None
    if cp.has_option("sweep", "workers"):
        workers = _get_int(cp, "sweep", "workers")
        if workers < 1:
            raise ConfigError("workers must be >= 1", section="sweep",
                              option="workers")

    rtol = _get_float(cp, "solver", "rtol") \
        if cp.has_option("solver", "rtol") else None
    atol = _get_float(cp, "solver", "atol") \
        if cp.has_option("solver", "atol") else None

    return SweepConfig(mode=mode, base=base, axes=tuple(axes),
                       fock_cutoff=fock_cutoff,
                       wigner_half_width=half_width, wigner_points=wpoints,
                       workers=workers,
                       label=cp.get("sweep", "label", fallback="").strip(),
                       solver_rtol=rtol, solver_atol=atol)


def _apply_axis(params: ModelParams, name: str, value: float) -> ModelParams:
    if name == "lambda":
        return params.replace(coupling=float(value))
    if name == "g_drive":
        return params.replace(g_drive=float(value))
    if name == "delta":
        return params.replace(delta_c=float(value), delta_a=float(value))
    if name == "kappa":
        return params.replace(kappa=float(value))
    if name == "n_atoms":
        return params.replace(n_atoms=int(round(value)))
    raise ConfigError(f"unknown axis name {name!r}")


# ---------------------------------------------------------------------------
# per-mode row computation

def columns_for(config: SweepConfig) -> list:
    mode = config.mode
    if mode == "wigner":
        return ["x", "y", "w", "error"]
    cols = ["axis1"]
    if mode != "switching-curve":
        cols.append("axis2")
    if mode in ("meanfield-map",):
        cols += ["phase", "n_stable"]
        for prefix, _ in _BRANCH_PREFIXES:
            cols += [f"{prefix}_alpha_re", f"{prefix}_alpha_im",
                     f"{prefix}_z", f"{prefix}_stable"]
    elif mode == "fluctuation-map":
        cols += ["phase", "n_stable"]
        cols += [f"{prefix}_ln_fluct" for prefix, _ in _BRANCH_PREFIXES]
    elif mode == "stability-map":
        cols += ["phase", "n_stable"]
        for prefix, _ in _BRANCH_PREFIXES:
            cols += [f"{prefix}_stable", f"{prefix}_max_re"]
    elif mode == "switching-curve":
        cols += ["phase", "n_stable", "branch", "alpha_re_abs",
                 "alpha_im_abs", "alpha_abs", "z"]
    elif mode in ("quantum-curve", "lambda-sweep"):
        cols += ["n_photon", "spin_x", "spin_y", "spin_z"]
    cols.append("error")
    return cols


def _phase_name(points) -> tuple:
    stable = [fp for fp in points if fp.stable]
    has_sp = any(fp.branch.is_superradiant for fp in stable)
    has_np = any(not fp.branch.is_superradiant for fp in stable)
    if not stable:
        return "none", 0
    if has_sp and has_np:
        return PhaseLabel.COEXISTENCE.value, len(stable)
    if has_sp:
        return PhaseLabel.SUPERRADIANT.value, len(stable)
    return PhaseLabel.NORMAL.value, len(stable)


def _by_branch(points) -> dict:
    return {fp.branch: fp for fp in points}


def _selected_stable(points):
    order = (BranchLabel.SP_PLUS_POS, BranchLabel.SP_MINUS_POS,
             BranchLabel.SP_PLUS_NEG, BranchLabel.SP_MINUS_NEG,
             BranchLabel.NP_DOWN, BranchLabel.NP_UP)
    table = _by_branch(points)
    for label in order:
        fp = table.get(label)
        if fp is not None and fp.stable:
            return fp
    return None


def _meanfield_cells(params: ModelParams) -> list:
    points = meanfield.fixed_points(params)
    phase, n_stable = _phase_name(points)
    table = _by_branch(points)
    cells = [phase, n_stable]
    for _, label in _BRANCH_PREFIXES:
        fp = table.get(label)
        if fp is None:
            cells += [None, None, None, None]
        else:
            cells += [fp.state.alpha_re, fp.state.alpha_im, fp.state.z,
                      fp.stable]
    return cells


def _fluctuation_cells(params: ModelParams) -> list:
    pts = fluctuations.point_fluctuations(params)
    points = [pf.fixed_point for pf in pts]
    phase, n_stable = _phase_name(points)
    value = {pf.fixed_point.branch: pf for pf in pts}
    cells = [phase, n_stable]
    err = ""
    for _, label in _BRANCH_PREFIXES:
        pf = value.get(label)
        if pf is None or pf.value is None:
            cells.append(None)
            if pf is not None and pf.error:
                err = pf.error
        else:
            cells.append(math.log1p(pf.value))
    return cells, err


def _stability_cells(params: ModelParams) -> list:
    points = meanfield.fixed_points(params)
    phase, n_stable = _phase_name(points)
    table = _by_branch(points)
    cells = [phase, n_stable]
    for _, label in _BRANCH_PREFIXES:
        fp = table.get(label)
        if fp is None:
            cells += [None, None]
        else:
            cells += [fp.stable, fp.max_real_part]
    return cells


def _switching_cells(params: ModelParams) -> list:
    points = meanfield.fixed_points(params)
    phase, n_stable = _phase_name(points)
    fp = _selected_stable(points)
    if fp is None:
        raise NoStableSolution("no stable fixed point at this drive")
    st = fp.state
    return [phase, n_stable, fp.branch.value, abs(st.alpha_re),
            abs(st.alpha_im), st.field_abs(), st.z]


def _quantum_cells(params: ModelParams, fock_cutoff: int) -> list:
    spec = quantum.HilbertSpec(params.n_atoms, fock_cutoff)
    rho = quantum.steady_state(params, spec)
    n = quantum.mean_photon(rho, spec)
    sx, sy, sz = quantum.collective_spin(rho, spec)
    return [n, sx, sy, sz]


def _point_task(job) -> tuple:
    config, index = job
    axes = config.axes
    if len(axes) == 2:
        n2 = axes[1].points
        i, j = divmod(index, n2)
        vals = (axes[0].values[i], axes[1].values[j])
    else:
        vals = (axes[0].values[index],)
    params = config.base
    for ax, v in zip(axes, vals):
        params = _apply_axis(params, ax.name, v)
    row = [vals[0]]
    if config.mode != "switching-curve":
        row.append(vals[1] if len(vals) == 2 else None)
    n_cells = len(columns_for(config)) - len(row) - 1
    try:
        if config.mode == "meanfield-map":
            cells, err = _meanfield_cells(params), ""
        elif config.mode == "fluctuation-map":
            cells, err = _fluctuation_cells(params)
        elif config.mode == "stability-map":
            cells, err = _stability_cells(params), ""
        elif config.mode == "switching-curve":
            cells, err = _switching_cells(params), ""
        elif config.mode in ("quantum-curve", "lambda-sweep"):
            cells, err = _quantum_cells(params, config.fock_cutoff), ""
        else:
            raise ConfigError(f"mode {config.mode} is not grid-based")
    except (SrlabError, ValueError, np.linalg.LinAlgError) as exc:
        cells, err = [None] * n_cells, f"{type(exc).__name__}: {exc}"
    row += cells
    row.append(err or None)
    return index, row


@dataclass
class SweepResult:
    columns: list
    rows: list
    n_errors: int
    extras: dict


def _wigner_result(config: SweepConfig) -> SweepResult:
    params = config.base
    try:
        spec = quantum.HilbertSpec(params.n_atoms, config.fock_cutoff)
        rho = quantum.steady_state(params, spec)
        hw, npts = config.wigner_half_width, config.wigner_points
        axis = np.linspace(-hw, hw, npts)
        grid = quantum.wigner(rho, spec, xs=axis, ys=axis)
    except (SrlabError, ValueError) as exc:
        extras = {"error": f"{type(exc).__name__}: {exc}"}
        return SweepResult(columns=columns_for(config), rows=[],
                           n_errors=1, extras=extras)
    rows = []
    for iy, yv in enumerate(grid.ys):
        for ix, xv in enumerate(grid.xs):
            rows.append([float(xv), float(yv),
                         float(grid.values[iy, ix]), None])
    maxima = grid.maxima()
    extras = {
        "integral": grid.integral(),
        "n_maxima": len(maxima),
        "maxima": [[x, y, v] for x, y, v in maxima],
        "n_photon": quantum.mean_photon(rho, spec),
    }
    return SweepResult(columns=columns_for(config), rows=rows, n_errors=0,
                       extras=extras)


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Execute every grid point and assemble rows in grid order."""
    if config.mode == "wigner":
        return _wigner_result(config)
    n_points = 1
    for ax in config.axes:
        n_points *= ax.points
    jobs = [(config, i) for i in range(n_points)]
    slots = [None] * n_points
    if workers <= 1 or n_points == 1:
        for job in jobs:
            idx, row = _point_task(job)
            slots[idx] = row
    else:
        ctx = get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            for idx, row in pool.imap_unordered(_point_task, jobs,
                                                chunksize=1):
                slots[idx] = row
    n_errors = sum(1 for row in slots if row[-1])
    return SweepResult(columns=columns_for(config), rows=slots,
                       n_errors=n_errors, extras={})


# ---------------------------------------------------------------------------
# export

def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(result: SweepResult, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([format_cell(v) for v in row])


def config_echo(config: SweepConfig) -> dict:
    p = config.base
    echo = {
        "mode": config.mode,
        "label": config.label,
        "params": {
            "delta_c": p.delta_c, "delta_a": p.delta_a,
            "coupling": p.coupling, "g_drive": p.g_drive,
            "kappa": p.kappa, "gamma": p.gamma, "n_atoms": p.n_atoms,
        },
        "axes": [{"name": ax.name, "values": list(ax.values)}
                 for ax in config.axes],
    }
    if config.mode in ("quantum-curve", "lambda-sweep", "wigner"):
        echo["fock_cutoff"] = config.fock_cutoff
    if config.mode == "wigner":
        echo["wigner"] = {"half_width": config.wigner_half_width,
                          "points": config.wigner_points}
    if config.solver_rtol is not None:
        echo["solver_rtol"] = config.solver_rtol
    if config.solver_atol is not None:
        echo["solver_atol"] = config.solver_atol
    return echo


def write_sidecar(config: SweepConfig, result: SweepResult,
                  path: str) -> None:
    doc = {
        "version": __version__,
        "config": config_echo(config),
        "summary": {
            "columns": result.columns,
            "n_rows": len(result.rows),
            "n_errors": result.n_errors,
        },
    }
    if result.extras:
        doc["results"] = result.extras
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
