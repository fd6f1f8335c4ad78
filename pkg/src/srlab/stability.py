"""Linearized drift matrix and eigenvalue-based stability classification.

The fluctuation basis is (dQ, dP, dX, dY, dZ) with the quadratures
dQ = sqrt(2) d alpha_re and dP = sqrt(2) d alpha_im. In that basis the drift
matrix A is the similarity transform T J T^-1 of the mean-field Jacobian J,
with T = diag(sqrt 2, sqrt 2, 1, 1, 1), so the spectra of A and J coincide.

Every fixed point carries one structural zero eigenvalue: the spin norm is
conserved by the flow, so (0, 0, x, y, z) is always a left null vector of J.
The verdict therefore deflates exactly one numerically-zero eigenvalue
before testing the rest; at the empty-cavity points that mode is the
decoupled dZ row itself.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import EigenFailure
from .params import ModelParams, SemiclassicalState, StabilityVerdict

EPS_REL = 1e-9
_SQRT2 = math.sqrt(2.0)


def jacobian(state: SemiclassicalState, params: ModelParams) -> np.ndarray:
    """5x5 drift matrix of the fluctuation dynamics at the given state."""
    j = kernels.jac5(state.as_array(), params.delta_c, params.delta_a,
                     params.coupling, params.g_drive, params.kappa)
    a = j.copy()
    a[:2, 2:] *= _SQRT2
    a[2:, :2] /= _SQRT2
    return a


def _eigenvalues(a: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigenvalue solver failed: {exc}") from exc


def verdict_from_spectrum(eigs: np.ndarray, scale: float) -> StabilityVerdict:
    """Deflate the structural zero mode, then test the remaining real parts."""
    eps = EPS_REL * scale
    eigs = np.asarray(eigs)
    mags = np.abs(eigs)
    drop = int(np.argmin(mags))
    if mags[drop] < eps:
        kept = np.delete(eigs, drop)
    else:
        kept = eigs  # no numerically-zero mode; test everything
    max_re = float(kept.real.max())
    return StabilityVerdict(max_real_part=max_re,
                            stable=max_re < -eps,
                            marginal=abs(max_re) <= eps)


def spectrum_and_verdict(a: np.ndarray):
    eigs = _eigenvalues(a)
    return eigs, verdict_from_spectrum(eigs, float(np.abs(a).max()))


def assess_stability(a: np.ndarray) -> StabilityVerdict:
    """Eigenvalue test with the structural zero mode excluded."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("drift matrix has non-finite entries")
    return spectrum_and_verdict(a)[1]
