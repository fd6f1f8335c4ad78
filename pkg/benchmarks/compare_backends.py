"""Compare the jitted and pure-numpy kernel backends.

Runs the same workloads in two subprocesses, one per SRLAB_BACKEND value,
and reports wall times plus the maximum numerical deviation between the
two runs. Usage: python3 benchmarks/compare_backends.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys
import tempfile

_WORKLOAD = r"""
import json, sys, time
import numpy as np
import srlab
from srlab import kernels, meanfield, quantum

quick = bool(int(sys.argv[1]))
out = {"backend": kernels.BACKEND, "times": {}, "checks": {}}
kernels.warmup()

# mean-field map: fixed-point search + stability over a grid
p = srlab.ModelParams(delta_c=5.0, delta_a=5.0, coupling=2.0, g_drive=0.0,
                      kappa=0.5)
n_lam, n_g = (40, 30) if quick else (120, 90)
t0 = time.perf_counter()
acc = 0.0
for lam in np.linspace(2.0, 9.0, n_lam):
    for g in np.linspace(0.0, 1.2, n_g):
        pts = meanfield.fixed_points(p.replace(coupling=float(lam),
                                               g_drive=float(g)))
        acc += sum(fp.state.z for fp in pts if fp.stable)
out["times"]["meanfield_map"] = time.perf_counter() - t0
out["checks"]["meanfield_acc"] = acc

# Wigner scan of a coexistence steady state
q = srlab.ModelParams(delta_c=5.0, delta_a=5.0, coupling=7.0, g_drive=0.6,
                      kappa=0.5, n_atoms=2)
spec = quantum.HilbertSpec(2, 25)
rho = quantum.steady_state(q, spec)
npts = 41 if quick else 101
axis = np.linspace(-5.0, 5.0, npts)
t0 = time.perf_counter()
grid = quantum.wigner(rho, spec, xs=axis, ys=axis)
out["times"]["wigner_scan"] = time.perf_counter() - t0
out["checks"]["wigner_integral"] = grid.integral()
out["checks"]["wigner_center"] = float(grid.values[npts // 2, npts // 2])

json.dump(out, open(sys.argv[2], "w"))
"""


def run_backend(backend: str, quick: bool) -> dict:
    env = dict(os.environ, SRLAB_BACKEND=backend)
    with tempfile.NamedTemporaryFile(suffix=".json", delete=False) as fh:
        path = fh.name
    try:
        subprocess.run([sys.executable, "-c", _WORKLOAD,
                        str(int(quick)), path], env=env, check=True)
        with open(path) as fh:
            return json.load(fh)
    finally:
        os.unlink(path)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true",
                    help="smaller grids for a fast smoke run")
    args = ap.parse_args()

    results = {b: run_backend(b, args.quick) for b in ("numpy", "numba")}
    for b, res in results.items():
        if res["backend"] != b:
            print(f"note: requested {b} but kernels ran as "
                  f"{res['backend']} (numba unavailable?)")

    print(f"{'workload':<16} {'numpy [s]':>10} {'numba [s]':>10} "
          f"{'speedup':>8}")
    for name in results["numpy"]["times"]:
        t_np = results["numpy"]["times"][name]
        t_nb = results["numba"]["times"][name]
        print(f"{name:<16} {t_np:>10.3f} {t_nb:>10.3f} "
              f"{t_np / t_nb:>7.2f}x")

    worst = 0.0
    for name in results["numpy"]["checks"]:
        a = results["numpy"]["checks"][name]
        b = results["numba"]["checks"][name]
        worst = max(worst, abs(a - b))
    print(f"max deviation between backends: {worst:.3e}")
    return 0 if worst < 1e-9 else 1


if __name__ == "__main__":
    sys.exit(main())
