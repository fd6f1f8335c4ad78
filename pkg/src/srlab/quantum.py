"""Lindblad dynamics of the collective spin plus cavity in the Dicke sector.

The Hilbert space is the fully symmetric spin-N/2 multiplet tensored with a
truncated Fock space. All superoperators use row-major vectorization,
vec(A X B) = (A kron B^T) vec(X), so density matrices reshape directly.

Hamiltonian and jump operators follow the model's master equation: cavity
decay at rate kappa and collective spin decay at rate gamma/N, with the
coupling scaled by 1/sqrt(N) so the semiclassical limit is N-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from . import kernels
from .errors import CutoffTooSmall, NonConvergence, StepRejected
from .params import ModelParams

DEFAULT_FOCK_CUTOFF = 50
MAX_ATOMS = 12


@dataclass(frozen=True)
class HilbertSpec:
    """Truncation choices for the joint spin-cavity space."""

    n_atoms: int
    fock_cutoff: int = DEFAULT_FOCK_CUTOFF

    def __post_init__(self):
        if not isinstance(self.n_atoms, int) or self.n_atoms < 1:
            raise ValueError("n_atoms must be a positive integer")
        if self.n_atoms > MAX_ATOMS:
            # the Liouvillian is dense enough that direct factorization past
            # this point exhausts memory long before it exhausts patience
            raise ValueError(f"n_atoms > {MAX_ATOMS} is not supported by the "
                             "direct solver")
        if not isinstance(self.fock_cutoff, int) or self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be a positive integer")

    @property
    def spin_dim(self) -> int:
        return self.n_atoms + 1

    @property
    def fock_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        return self.spin_dim * self.fock_dim


def spin_operators(n_atoms: int):
    """(S_z, S_+, S_-) in the spin-N/2 multiplet, m sorted descending."""
    j = n_atoms / 2.0
    m = np.arange(j, -j - 1.0, -1.0)
    sz = np.diag(m)
    raise_op = np.zeros((n_atoms + 1, n_atoms + 1))
    for i in range(1, n_atoms + 1):
        raise_op[i - 1, i] = math.sqrt(j * (j + 1) - m[i] * (m[i] + 1.0))
    return sz, raise_op, raise_op.T.copy()


def annihilation(fock_cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, fock_cutoff + 1)), 1)


def cavity_field(spec: HilbertSpec) -> np.ndarray:
    return np.kron(np.eye(spec.spin_dim), annihilation(spec.fock_cutoff))


def spin_z(spec: HilbertSpec) -> np.ndarray:
    sz, _, _ = spin_operators(spec.n_atoms)
    return np.kron(sz, np.eye(spec.fock_dim))


def spin_raising(spec: HilbertSpec) -> np.ndarray:
    _, sp_, _ = spin_operators(spec.n_atoms)
    return np.kron(sp_, np.eye(spec.fock_dim))


def spin_lowering(spec: HilbertSpec) -> np.ndarray:
    _, _, sm = spin_operators(spec.n_atoms)
    return np.kron(sm, np.eye(spec.fock_dim))


def _check_atoms(params: ModelParams, spec: HilbertSpec):
    if params.n_atoms != spec.n_atoms:
        raise ValueError(
            f"params.n_atoms={params.n_atoms} does not match "
            f"spec.n_atoms={spec.n_atoms}")


def build_hamiltonian(params: ModelParams, spec: HilbertSpec) -> np.ndarray:
    _check_atoms(params, spec)
    a = cavity_field(spec)
    ad = a.T.copy()
    h = params.delta_c * (ad @ a)
    h += params.delta_a * spin_z(spec)
    scale = params.coupling / math.sqrt(spec.n_atoms)
    h += scale * (spin_raising(spec) @ a + spin_lowering(spec) @ ad)
    h += params.g_drive * (a @ a + ad @ ad)
    return h


def _dissipator(m: np.ndarray, rate: float) -> sp.csr_matrix:
    ms = sp.csr_matrix(m)
    md = ms.conj().T
    mdm = (md @ ms).tocsr()
    eye = sp.identity(m.shape[0], format="csr")
    return rate * (2.0 * sp.kron(ms, ms.conj(), format="csr")
                   - sp.kron(mdm, eye, format="csr")
                   - sp.kron(eye, mdm.T, format="csr"))


def build_liouvillian(params: ModelParams, spec: HilbertSpec) -> sp.csr_matrix:
    """Sparse generator acting on row-major vectorized density matrices."""
    h = build_hamiltonian(params, spec)
    hs = sp.csr_matrix(h)
    eye = sp.identity(spec.dim, format="csr")
    liou = -1j * (sp.kron(hs, eye, format="csr")
                  - sp.kron(eye, hs.T, format="csr"))
    liou = liou + _dissipator(cavity_field(spec), params.kappa)
    if params.gamma > 0.0:
        liou = liou + _dissipator(spin_lowering(spec),
                                  params.gamma / spec.n_atoms)
    return liou.tocsr()


RESIDUAL_REL = 1e-9
POSITIVITY_TOL = 1e-8


def _finalize(rho: np.ndarray, liou: sp.csr_matrix) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if not np.isfinite(tr) or abs(tr) < 1e-300:
        raise NonConvergence("steady-state solve returned a traceless matrix")
    rho = rho / tr
    scale = np.abs(liou.data).max() if liou.nnz else 1.0
    resid = float(np.abs(liou @ rho.reshape(-1)).max())
    if resid > RESIDUAL_REL * scale:
        raise NonConvergence("steady-state residual too large",
                             residual=resid)
    lo = float(np.linalg.eigvalsh(rho).min())
    if lo < -POSITIVITY_TOL:
        raise NonConvergence(
            f"steady state has negative population {lo:.3e}")
    return rho


def _steady_direct(liou: sp.csr_matrix, dim: int) -> np.ndarray:
    bordered = liou.tolil(copy=True)
    tr_idx = np.arange(dim) * dim + np.arange(dim)
    bordered.rows[0] = list(tr_idx)
    bordered.data[0] = [1.0] * dim
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    lu = spla.splu(bordered.tocsc())
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise RuntimeError("singular bordered system")
    return x.reshape(dim, dim)


def _steady_by_evolution(liou: sp.csr_matrix, dim: int,
                         t_block: float = 50.0,
                         max_blocks: int = 40) -> np.ndarray:
    """Relax the maximally mixed state under the generator.

    Used only when the direct factorization fails; integrates in blocks
    until the generator residual stops improving or falls below tolerance.
    """
    scale = np.abs(liou.data).max() if liou.nnz else 1.0
    v = (np.eye(dim, dtype=complex) / dim).reshape(-1)
    best = np.inf
    for _ in range(max_blocks):
        sol = solve_ivp(lambda t, y: liou @ y, (0.0, t_block), v,
                        method="RK45", rtol=1e-10, atol=1e-12)
        if not sol.success:
            raise NonConvergence("relaxation integrator failed: "
                                 + sol.message)
        v = sol.y[:, -1]
        resid = float(np.abs(liou @ v).max())
        if resid < 0.1 * RESIDUAL_REL * scale:
            break
        if resid > 0.5 * best:
            break
        best = min(best, resid)
    return v.reshape(dim, dim)


def steady_state(params: ModelParams,
                 spec: HilbertSpec | None = None) -> np.ndarray:
    """Null state of the Liouvillian, normalized and hermitized.

    Solves the bordered linear system with the trace condition replacing
    one redundant row. If the factorization is singular (possible when a
    conserved quantity splits the generator) the state is instead relaxed
    by time evolution from the maximally mixed state.
    """
    if spec is None:
        spec = HilbertSpec(params.n_atoms)
    liou = build_liouvillian(params, spec)
    try:
        rho = _steady_direct(liou, spec.dim)
    except RuntimeError:
        rho = _steady_by_evolution(liou, spec.dim)
    return _finalize(rho, liou)


def time_evolve(params: ModelParams, spec: HilbertSpec, rho0: np.ndarray,
                times: np.ndarray, rtol: float = 1e-8,
                atol: float = 1e-10) -> np.ndarray:
    """Density matrices at the requested times, earliest first."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing with >= 2 points")
    if rho0.shape != (spec.dim, spec.dim):
        raise ValueError(f"rho0 must be {spec.dim} x {spec.dim}")
    liou = build_liouvillian(params, spec)
    v0 = np.asarray(rho0, dtype=complex).reshape(-1)
    sol = solve_ivp(lambda t, y: liou @ y, (times[0], times[-1]), v0,
                    t_eval=times, method="RK45", rtol=rtol, atol=atol)
    if not sol.success:
        raise StepRejected(f"integrator stopped early: {sol.message}")
    return sol.y.T.reshape(len(times), spec.dim, spec.dim)


def mean_photon(rho: np.ndarray, spec: HilbertSpec) -> float:
    n_per_slot = np.tile(np.arange(spec.fock_dim, dtype=float), spec.spin_dim)
    return float((np.diagonal(rho).real * n_per_slot).sum())


def collective_spin(rho: np.ndarray, spec: HilbertSpec):
    """Expectation values (<S_x>, <S_y>, <S_z>)."""
    sp_ = spin_raising(spec)
    sm = spin_lowering(spec)
    sz = spin_z(spec)
    ex_p = np.trace(sp_ @ rho)
    ex_m = np.trace(sm @ rho)
    ex_z = np.trace(sz @ rho).real
    sx = 0.5 * (ex_p + ex_m)
    sy = -0.5j * (ex_p - ex_m)
    return float(sx.real), float(sy.real), float(ex_z)


def reduced_cavity(rho: np.ndarray, spec: HilbertSpec) -> np.ndarray:
    r4 = rho.reshape(spec.spin_dim, spec.fock_dim,
                     spec.spin_dim, spec.fock_dim)
    return np.einsum("sfsg->fg", r4)


DEFAULT_GRID_HALFWIDTH = 5.0
DEFAULT_GRID_POINTS = 101
MAXIMA_REL_FLOOR = 0.01
TOP_BAND_MASS_LIMIT = 1e-3
SUPPORT_TAIL_MASS = 1e-14


def default_axis() -> np.ndarray:
    return np.linspace(-DEFAULT_GRID_HALFWIDTH, DEFAULT_GRID_HALFWIDTH,
                       DEFAULT_GRID_POINTS)


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function samples on a rectangular phase-space grid."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        inner = np.trapezoid(self.values, self.xs, axis=1)
        return float(np.trapezoid(inner, self.ys))

    def maxima(self, rel_floor: float = MAXIMA_REL_FLOOR):
        """Strict interior local maxima above rel_floor * max, as
        (x, y, value) triples."""
        w = self.values
        floor = rel_floor * w.max()
        out = []
        for i in range(1, w.shape[0] - 1):
            for j in range(1, w.shape[1] - 1):
                v = w[i, j]
                if v <= floor:
                    continue
                patch = w[i - 1:i + 2, j - 1:j + 2].copy()
                patch[1, 1] = -np.inf
                if v > patch.max():
                    out.append((float(self.xs[j]), float(self.ys[i]),
                                float(v)))
        return out

    def count_maxima(self, rel_floor: float = MAXIMA_REL_FLOOR) -> int:
        return len(self.maxima(rel_floor))


def _check_cutoff(diag: np.ndarray):
    nf = diag.size
    band = max(2, nf // 10)
    mass = float(diag[nf - band:].sum())
    if mass > TOP_BAND_MASS_LIMIT:
        raise CutoffTooSmall(
            f"population {mass:.3e} within {band} levels of the Fock cutoff; "
            "displaced states would fold back off the truncation edge")


def wigner_cavity(rc: np.ndarray, xs=None, ys=None) -> WignerGrid:
    """Wigner function of a cavity density matrix by displaced parity.

    The displacement operators are exponentiated in a working space padded
    well past the state support: a displacement by beta moves population up
    to about |beta|^2 + O(|beta|) levels, and exponentials taken in a space
    that merely holds the state wrap around the truncation edge and produce
    spurious structure at large radius.
    """
    xs = default_axis() if xs is None else np.asarray(xs, dtype=float)
    ys = default_axis() if ys is None else np.asarray(ys, dtype=float)
    diag = np.diagonal(rc).real
    _check_cutoff(diag)
    tail = np.concatenate([np.cumsum(diag[::-1])[::-1], [0.0]])
    nf = rc.shape[0]
    for k in range(nf, 0, -1):
        if tail[k] > SUPPORT_TAIL_MASS:
            nf = k + 1
            break
    else:
        nf = 1
    nf = min(max(nf, 2), rc.shape[0])
    r_max = math.hypot(max(abs(xs[0]), abs(xs[-1])),
                       max(abs(ys[0]), abs(ys[-1])))
    nw = nf + math.ceil(r_max * r_max + 6.0 * r_max) + 10
    n = np.arange(nw, dtype=float)
    gen = 1j * (np.diag(np.sqrt(n[1:]), -1) - np.diag(np.sqrt(n[1:]), 1))
    eigs, u = np.linalg.eigh(gen)
    u_full = np.ascontiguousarray(u.conj().T)
    u_state = np.ascontiguousarray(u[:nf, :])
    parity = (-1.0) ** n
    rho_s = np.ascontiguousarray(rc[:nf, :nf], dtype=complex)
    values = kernels.wigner_scan(rho_s, u_full, u_state, eigs, parity, xs, ys)
    return WignerGrid(xs=xs, ys=ys, values=values)


def wigner(rho: np.ndarray, spec: HilbertSpec, xs=None, ys=None) -> WignerGrid:
    """Wigner function of the cavity after tracing out the spin."""
    return wigner_cavity(reduced_cavity(rho, spec), xs=xs, ys=ys)


def cutoff_convergence(params: ModelParams, cutoffs) -> np.ndarray:
    """Steady photon number at each Fock cutoff, for truncation checks."""
    out = []
    for nc in cutoffs:
        spec = HilbertSpec(params.n_atoms, int(nc))
        rho = steady_state(params, spec)
        out.append(mean_photon(rho, spec))
    return np.asarray(out)
