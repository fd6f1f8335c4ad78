"""Steady-state fluctuations from the Lyapunov equation.

The linearized dynamics df = A f dt + noise has the steady covariance
V solving A V + V A^T = -D. Input noise is vacuum, so D carries kappa on
the two quadrature slots only. The drift matrix at any fixed point has one
structural zero mode along the spin shell; that mode is noise-free, and the
physical covariance satisfies V w = 0 for the shell direction w, which is
imposed as an exact constraint whenever the spectrum is degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import meanfield, stability
from .errors import BoundaryPole, UnstableDrift
from .params import ModelParams, meanfield_detuning

RESIDUAL_REL = 1e-10


def diffusion_matrix(params: ModelParams) -> np.ndarray:
    """Vacuum-input diffusion matrix diag(kappa, kappa, 0, 0, 0)."""
    d = np.zeros((5, 5))
    d[0, 0] = params.kappa
    d[1, 1] = params.kappa
    return d


def _solve_block(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Lyapunov solve on a block with no decoupled rows left."""
    n = a.shape[0]
    scale = max(float(np.abs(a).max()), 1e-300)
    eps = stability.EPS_REL * scale
    eigs = np.linalg.eigvals(a)
    if eigs.real.max() > eps:
        raise UnstableDrift(
            f"drift matrix has eigenvalue with real part {eigs.real.max():.3e} > 0")
    eye = np.eye(n)
    m = np.kron(a, eye) + np.kron(eye, a)
    rhs = -d.reshape(-1)
    pair_sums = np.abs(eigs[:, None] + eigs[None, :])
    if pair_sums.min() > 2.0 * eps:
        v = np.linalg.solve(m, rhs).reshape(n, n)
    else:
        # degenerate spectrum: anchor the solve with the zero-fluctuation
        # direction when one exists, then take the minimum-norm solution
        rows = [m]
        vals = [rhs]
        idx = int(np.argmin(np.abs(eigs)))
        if np.abs(eigs[idx]) < eps:
            wl, vl = np.linalg.eig(a.T)
            k = int(np.argmin(np.abs(wl)))
            w = vl[:, k]
            w = np.real_if_close(w / np.linalg.norm(w), tol=1000)
            if np.iscomplexobj(w):
                w = np.abs(w)
            c = np.zeros((n, n * n))
            for i in range(n):
                c[i, i * n:(i + 1) * n] = np.real(w)
            rows.append(c)
            vals.append(np.zeros(n))
        stacked = np.vstack(rows)
        target = np.concatenate(vals)
        v = np.linalg.lstsq(stacked, target, rcond=None)[0].reshape(n, n)
    return 0.5 * (v + v.T)


def lyapunov_solve(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Steady covariance matrix for drift a and diffusion d.

    Rows that are exactly decoupled (zero row and column, as the dZ mode is
    at the empty-cavity points) are removed first and re-embedded as zeros.
    Raises UnstableDrift when the remaining drift has a positive eigenvalue
    or when a marginal mode turns out to be noise-driven, in which case no
    steady covariance exists.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    dead = [i for i in range(n)
            if not a[i, :].any() and not a[:, i].any()]
    if any(d[i, :].any() or d[:, i].any() for i in dead):
        raise UnstableDrift("noise drives an exactly decoupled mode")
    keep = [i for i in range(n) if i not in dead]
    sub = _solve_block(a[np.ix_(keep, keep)], d[np.ix_(keep, keep)])
    v = np.zeros((n, n))
    v[np.ix_(keep, keep)] = sub
    resid = np.abs(a @ v + v @ a.T + d).max()
    bound = RESIDUAL_REL * max(float(np.abs(d).max()), 1e-30)
    if resid > bound:
        raise UnstableDrift(
            f"no steady covariance: residual {resid:.3e} exceeds {bound:.3e}")
    return v


def photon_fluctuation(v: np.ndarray) -> float:
    """Steady photon-number fluctuation from the quadrature variances."""
    return 0.5 * ((v[0, 0] + v[1, 1]) - 1.0)


def np_variance_closed_form(params: ModelParams) -> float:
    """Printed closed-form variance for the empty-cavity phase, verbatim.

    This expression is reported alongside the Lyapunov value but is not
    used as ground truth; the two disagree away from trivial limits (the
    printed form mixes terms of different dimension), and the Lyapunov
    solution is the authoritative one.
    """
    delta = meanfield_detuning(params)
    lam, g, kappa = params.coupling, params.g_drive, params.kappa
    d2 = delta * delta
    l2 = lam * lam
    k4 = kappa * kappa - 4.0 * g * g
    num = 2.0 * g * g * ((2.0 * d2 - l2) + d2 * (k4 + l2))
    f1 = k4 + 4.0 * d2
    f2 = (d2 - l2) + d2 * k4
    ref1 = abs(k4) + 4.0 * d2 + 1e-300
    ref2 = abs(d2 - l2) + abs(d2 * k4) + 1e-300
    if abs(f1) < 1e-12 * ref1 or abs(f2) < 1e-12 * ref2:
        raise BoundaryPole("closed-form variance denominator vanishes")
    return num / (f1 * f2)


@dataclass(frozen=True)
class PointFluctuations:
    fixed_point: object
    value: float | None
    error: str | None


def point_fluctuations(params: ModelParams) -> list:
    """Photon fluctuation for every stable fixed point at one parameter set."""
    d = diffusion_matrix(params)
    out = []
    for fp in meanfield.fixed_points(params):
        if not fp.stable:
            out.append(PointFluctuations(fp, None, None))
            continue
        try:
            v = lyapunov_solve(stability.jacobian(fp.state, params), d)
            out.append(PointFluctuations(fp, photon_fluctuation(v), None))
        except UnstableDrift as exc:
            out.append(PointFluctuations(fp, None, str(exc)))
    return out


@dataclass(frozen=True)
class FluctuationMap:
    couplings: np.ndarray
    drives: np.ndarray
    counts: np.ndarray
    ln_fluct: dict
    errors: dict


def fluctuation_map(couplings, drives, params: ModelParams) -> FluctuationMap:
    """ln(fluctuation + 1) per stable branch over a (coupling, drive) grid."""
    couplings = np.asarray(couplings, dtype=float)
    drives = np.asarray(drives, dtype=float)
    shape = (couplings.size, drives.size)
    counts = np.zeros(shape, dtype=int)
    grids = {}
    errors = {}
    for i, lam in enumerate(couplings):
        for j, g in enumerate(drives):
            p = params.replace(coupling=float(lam), g_drive=float(g))
            try:
                pts = point_fluctuations(p)
            except Exception as exc:  # per-point failures are data, not fatal
                errors[(i, j)] = str(exc)
                continue
            counts[i, j] = sum(1 for pf in pts if pf.fixed_point.stable)
            for pf in pts:
                if pf.value is None:
                    if pf.error:
                        errors[(i, j)] = pf.error
                    continue
                key = pf.fixed_point.branch
                if key not in grids:
                    grids[key] = np.full(shape, np.nan)
                grids[key][i, j] = np.log1p(pf.value)
    return FluctuationMap(couplings=couplings, drives=drives, counts=counts,
                          ln_fluct=grids, errors=errors)
