"""Numerical kernels with an optional numba backend.

Every kernel is written once as a plain numpy function. When numba is
importable (and not disabled) the module-level names are rebound to jitted
versions; the original python implementations stay reachable through
``.py_func`` for equivalence testing. Set SRLAB_BACKEND=numpy to force the
plain path, SRLAB_BACKEND=numba to require the jitted one.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

_requested = os.environ.get("SRLAB_BACKEND", "").strip().lower()

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _HAVE_NUMBA = False

    def prange(*args):  # noqa: N802 - mirrors numba.prange
        return range(*args)


if _requested in ("", "numba", "numpy"):
    if _requested == "numba" and not _HAVE_NUMBA:
        warnings.warn("SRLAB_BACKEND=numba requested but numba is not "
                      "importable; falling back to numpy", RuntimeWarning)
    BACKEND = "numba" if (_HAVE_NUMBA and _requested != "numpy") else "numpy"
else:
    warnings.warn(f"unknown SRLAB_BACKEND={_requested!r}; using default",
                  RuntimeWarning)
    BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def jit_enabled() -> bool:
    return BACKEND == "numba"


def rhs5(y, dc, da, lam, g, kappa):
    """Semiclassical equations of motion for (alpha_re, alpha_im, x, y, z).

    The field rows carry the cavity detuning, the spin rows the atomic one;
    the scaled variables make the equations independent of n_atoms.
    """
    a_re, a_im, sx, sy, sz = y[0], y[1], y[2], y[3], y[4]
    out = np.empty(5)
    out[0] = (dc - 2.0 * g) * a_im - kappa * a_re - lam * sy
    out[1] = -(dc + 2.0 * g) * a_re - kappa * a_im - lam * sx
    out[2] = -da * sy - 2.0 * lam * sz * a_im
    out[3] = da * sx - 2.0 * lam * sz * a_re
    out[4] = 2.0 * lam * (sy * a_re + sx * a_im)
    return out


def jac5(y, dc, da, lam, g, kappa):
    """Jacobian of rhs5 with respect to the five state variables."""
    a_re, a_im, sx, sy, sz = y[0], y[1], y[2], y[3], y[4]
    j = np.zeros((5, 5))
    j[0, 0] = -kappa
    j[0, 1] = dc - 2.0 * g
    j[0, 3] = -lam
    j[1, 0] = -(dc + 2.0 * g)
    j[1, 1] = -kappa
    j[1, 2] = -lam
    j[2, 1] = -2.0 * lam * sz
    j[2, 3] = -da
    j[2, 4] = -2.0 * lam * a_im
    j[3, 0] = -2.0 * lam * sz
    j[3, 2] = da
    j[3, 4] = -2.0 * lam * a_re
    j[4, 0] = 2.0 * lam * sy
    j[4, 1] = 2.0 * lam * sx
    j[4, 2] = 2.0 * lam * a_im
    j[4, 3] = 2.0 * lam * a_re
    return j


def newton_refine(y0, dc, da, lam, g, kappa, tol, max_iter):
    """Damped Newton iteration on the full 5-dim right-hand side.

    The Jacobian is exactly singular along the spin shell at any fixed
    point, so the step is the minimum-norm least-squares solution. The step
    is halved while it increases the residual.
    """
    y = y0.copy()
    r = rhs5(y, dc, da, lam, g, kappa)
    rn = np.sqrt(np.sum(r * r))
    for _ in range(max_iter):
        if rn <= tol:
            break
        j = jac5(y, dc, da, lam, g, kappa)
        step = np.linalg.lstsq(j, -r)[0]
        scale = 1.0
        y_try = y
        r_try = r
        rn_try = rn
        improved = False
        for _damp in range(30):
            y_try = y + scale * step
            r_try = rhs5(y_try, dc, da, lam, g, kappa)
            rn_try = np.sqrt(np.sum(r_try * r_try))
            if rn_try < rn:
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
        y, r, rn = y_try, r_try, rn_try
    return y, rn


def wigner_scan(rho_s, u_full, u_state, eigs, parity, xs, ys):
    """Displaced-parity Wigner values on a rectangular grid.

    rho_s    state block (nf x nf) of the density matrix
    u_full   conjugate-transposed eigenvector matrix of i(adag - a) in the
             padded working space (nw x nw, C-contiguous)
    u_state  first nf rows of the eigenvector matrix (nf x nw)
    eigs     eigenvalues of i(adag - a)
    parity   diagonal of the photon parity operator in the working space

    Each grid point beta = x + i y factors the displacement into a number
    rotation by arg(beta) and a real-axis displacement by |beta|; only the
    nf rows that overlap the state are ever multiplied out.
    """
    nf = rho_s.shape[0]
    npts_y = ys.shape[0]
    npts_x = xs.shape[0]
    two_over_pi = 2.0 / np.pi
    out = np.empty((npts_y, npts_x))
    for iy in prange(npts_y):
        for ix in range(npts_x):
            x = xs[ix]
            y = ys[iy]
            r = np.sqrt(x * x + y * y)
            theta = np.arctan2(y, x) if r > 0.0 else 0.0
            phase = np.exp(-1j * r * eigs)
            b = np.dot(u_state * phase, u_full)
            bc = np.ascontiguousarray(b.conj().T)
            pblock = np.dot(b * parity, bc)
            acc = 0.0
            for n in range(nf):
                for m in range(nf):
                    rot = np.exp(1j * theta * (m - n))
                    acc += (rho_s[n, m] * rot * pblock[m, n]).real
            out[iy, ix] = two_over_pi * acc
    return out


if BACKEND == "numba":
    rhs5 = njit(cache=True)(rhs5)
    jac5 = njit(cache=True)(jac5)
    newton_refine = njit(cache=True)(newton_refine)
    wigner_scan = njit(cache=True, parallel=True)(wigner_scan)


def warmup():
    """Trigger jit compilation of all kernels (no-op on the numpy path)."""
    y = np.array([0.01, -0.02, 0.1, 0.1, -0.45])
    rhs5(y, 5.0, 5.0, 1.0, 0.2, 0.5)
    jac5(y, 5.0, 5.0, 1.0, 0.2, 0.5)
    newton_refine(y, 5.0, 5.0, 1.0, 0.2, 0.5, 1e-12, 3)
    rho = np.eye(2, dtype=np.complex128)
    m = np.array([[0.0, 1j], [-1j, 0.0]], dtype=np.complex128)
    eigs, u = np.linalg.eigh(m)
    uc = np.ascontiguousarray(u.conj().T)
    us = np.ascontiguousarray(u[:2, :])
    par = np.array([1.0, -1.0])
    grid = np.array([0.0, 0.5])
    wigner_scan(rho, uc, us, eigs, par, grid, grid)
