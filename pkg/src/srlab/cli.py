"""srlab command line: run a configured sweep and export CSV/JSON/PNG.

Exit codes: 0 full success, 1 configuration problems, 2 when one or more
grid points failed (their rows carry the error message and the rest of the
data is still written).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import render, sweep
from ._version import __version__
from .errors import ConfigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srlab",
        description="Steady states, stability, fluctuations, and Wigner "
                    "maps of a squeezed-drive collective-spin cavity.")
    parser.add_argument("--version", action="version",
                        version=f"srlab {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, metavar="mode")
    for mode in sweep.MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel worker processes "
                            "(default: SRLAB_WORKERS or config or 1)")
        p.add_argument("--no-render", action="store_true",
                       help="skip PNG rendering")
    return parser


def resolve_workers(cli_value, config_value) -> int:
    if cli_value is not None:
        if cli_value < 1:
            raise ConfigError("--workers must be >= 1")
        return cli_value
    env = os.environ.get("SRLAB_WORKERS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(
                f"SRLAB_WORKERS={env!r} is not an integer") from None
        if n < 1:
            raise ConfigError("SRLAB_WORKERS must be >= 1")
        return n
    if config_value is not None:
        return config_value
    return 1


def _column(result, name):
    idx = result.columns.index(name)
    return [row[idx] for row in result.rows]


def _to_float(values) -> np.ndarray:
    return np.array([np.nan if v is None else float(v) for v in values])


def _render_result(config, result, path) -> None:
    mode = config.mode
    if mode == "wigner":
        if not result.rows:
            return
        n = config.wigner_points
        grid = _to_float(_column(result, "w")).reshape(n, n)
        render.diverging_heatmap(path, grid)
        return

    axes = config.axes
    if len(axes) == 2:
        n1, n2 = axes[0].points, axes[1].points
        if mode == "meanfield-map":
            re = _to_float(_column(result, "sp_plus_alpha_re"))
            im = _to_float(_column(result, "sp_plus_alpha_im"))
            phase = _column(result, "phase")
            vals = np.hypot(re, im)
            for k, ph in enumerate(phase):
                if math.isnan(vals[k]) and ph == "normal":
                    vals[k] = 0.0
        elif mode == "stability-map":
            vals = _to_float(_column(result, "n_stable"))
        elif mode == "fluctuation-map":
            stacked = [_to_float(_column(result, f"{p}_ln_fluct"))
                       for p in ("np_down", "sp_plus", "np_up", "sp_minus")]
            vals = np.full(len(result.rows), np.nan)
            for layer in stacked:
                take = np.isnan(vals) & ~np.isnan(layer)
                vals[take] = layer[take]
        else:  # quantum curves over a discrete second axis: one per value
            xs = _to_float(_column(result, "axis1")).reshape(n1, n2)
            ys = _to_float(_column(result, "n_photon")).reshape(n1, n2)
            render.curves(path, xs[:, 0], [ys[:, j] for j in range(n2)])
            return
        # axis1 runs horizontally, axis2 vertically
        render.heatmap(path, vals.reshape(n1, n2).T)
        return

    xs = _to_float(_column(result, "axis1"))
    if mode == "switching-curve":
        series = [_to_float(_column(result, "alpha_re_abs")),
                  _to_float(_column(result, "alpha_im_abs"))]
    elif mode == "fluctuation-map":
        series = [_to_float(_column(result, f"{p}_ln_fluct"))
                  for p, _ in sweep._BRANCH_PREFIXES]
    else:
        series = [_to_float(_column(result, "n_photon"))]
    render.curves(path, xs, series)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = sweep.parse_config(args.config, mode=args.mode)
        workers = resolve_workers(args.workers, config.workers)
    except ConfigError as exc:
        print(f"srlab: config error: {exc}", file=sys.stderr)
        return 1

    result = sweep.run_sweep(config, workers=workers)

    os.makedirs(args.out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.config))[0]
    csv_path = os.path.join(args.out, stem + ".csv")
    json_path = os.path.join(args.out, stem + ".json")
    sweep.write_csv(result, csv_path)
    sweep.write_sidecar(config, result, json_path)
    outputs = [csv_path, json_path]
    if not args.no_render:
        png_path = os.path.join(args.out, stem + ".png")
        _render_result(config, result, png_path)
        if os.path.exists(png_path):
            outputs.append(png_path)

    status = "ok" if result.n_errors == 0 else \
        f"{result.n_errors} point(s) failed"
    print(f"srlab {config.mode}: {len(result.rows)} rows, {status} -> "
          + ", ".join(outputs))
    return 0 if result.n_errors == 0 else 2


if __name__ == "__main__":
    sys.exit(main())
