"""Closed-form steady-state branches, phase boundaries and classification.

The steady states come in up to six branches: the empty-cavity points with
the collective spin fully down or up, and two pairs of symmetry-broken
points built on the two real roots z_plus, z_minus of the branch constraint.
Each symmetry-broken state is constructed exactly on the spin shell and then
polished with a damped Newton iteration on the full equations of motion.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels, stability
from .errors import NoStableSolution, OffShell, ZeroCoupling
from .params import (ALL_BRANCHES, BranchLabel, FixedPoint, ModelParams,
                     PhaseLabel, PhaseResult, SemiclassicalState,
                     meanfield_detuning)

NEWTON_MAX_ITER = 50


def z_branches(params: ModelParams) -> tuple:
    """Real roots of the branch constraint, largest first.

    Returns an empty tuple when 4 G^2 < kappa^2 (no real root), a single
    value at the degenerate point 4 G^2 = kappa^2, and the (z_plus, z_minus)
    pair otherwise. Roots are returned regardless of whether they lie on the
    physical shell |z| <= 1/2; callers filter.
    """
    delta = meanfield_detuning(params)
    lam = params.coupling
    if lam == 0.0:
        raise ZeroCoupling("branch constraint needs a nonzero coupling")
    disc = 4.0 * params.g_drive ** 2 - params.kappa ** 2
    if disc < 0.0:
        return ()
    pref = delta / (2.0 * lam * lam)
    if disc == 0.0:
        return (pref * -delta,)
    s = math.sqrt(disc)
    return (pref * (-delta + s), pref * (-delta - s))


def alpha_from_z(z: float, params: ModelParams) -> tuple:
    """The two sign-related field solutions for a given branch value z.

    The field direction is the null vector of the 2x2 homogeneous steady
    cavity system (spin components eliminated through the shell relations),
    taken from whichever of its two rows is better conditioned; the length
    is fixed by the spin conservation law. Built this way the state sits on
    the shell exactly, including at the removable singularity of the ratio
    form of the amplitude equation.
    """
    delta = meanfield_detuning(params)
    lam, g, kappa = params.coupling, params.g_drive, params.kappa
    if abs(z) > 0.5:
        raise OffShell(f"|z| = {abs(z)} > 1/2, no real field amplitude")
    p = 0.25 - z * z
    q = 4.0 * lam * lam * z * z / (delta * delta)
    if q == 0.0:
        raise OffShell("field amplitude diverges at z = 0")
    # two parallel null directions of the singular field system
    den_ratio = 2.0 * lam * lam * z / delta + delta - 2.0 * g
    d1 = (den_ratio, kappa)
    d2 = (kappa, -(delta + 2.0 * g + 2.0 * lam * lam * z / delta))
    d = d1 if math.hypot(*d1) >= math.hypot(*d2) else d2
    dn = math.hypot(*d)
    amp = math.sqrt(p / q)
    a_re = amp * d[0] / dn
    a_im = amp * d[1] / dn
    if a_re < 0.0 or (a_re == 0.0 and a_im < 0.0):
        a_re, a_im = -a_re, -a_im
    states = []
    for sgn in (1.0, -1.0):
        re, im = sgn * a_re, sgn * a_im
        states.append(SemiclassicalState(
            alpha_re=re,
            alpha_im=im,
            x=2.0 * lam * z * re / delta,
            y=-2.0 * lam * z * im / delta,
            z=z,
        ))
    return tuple(states)


def _assess(state: SemiclassicalState, params: ModelParams, branch: BranchLabel) -> FixedPoint:
    a = stability.jacobian(state, params)
    eigs, verdict = stability.spectrum_and_verdict(a)
    return FixedPoint(state=state, branch=branch, stable=verdict.stable,
                      marginal=verdict.marginal, spectrum=tuple(eigs),
                      max_real_part=verdict.max_real_part)


def fixed_points(params: ModelParams) -> list:
    """All mean-field fixed points with stability tags, Newton-polished."""
    pts = [
        _assess(SemiclassicalState.normal_phase(), params, BranchLabel.NP_DOWN),
        _assess(SemiclassicalState.normal_phase(inverted=True), params,
                BranchLabel.NP_UP),
    ]
    roots = z_branches(params)
    tol = 1e-12 * max(params.max_rate(), 1.0)
    labels = [(BranchLabel.SP_PLUS_POS, BranchLabel.SP_PLUS_NEG),
              (BranchLabel.SP_MINUS_POS, BranchLabel.SP_MINUS_NEG)]
    for idx, z in enumerate(roots):
        if abs(z) > 0.5:
            continue
        if 0.25 - z * z == 0.0:
            continue  # zero-amplitude root coincides with the empty-cavity point
        pair = alpha_from_z(z, params)
        for state, label in zip(pair, labels[idx]):
            y, _rn = kernels.newton_refine(
                state.as_array(), params.delta_c, params.delta_a,
                params.coupling, params.g_drive, params.kappa,
                tol, NEWTON_MAX_ITER)
            pts.append(_assess(SemiclassicalState.from_array(y), params, label))
    return pts


def boundary_g_lower(params: ModelParams) -> float:
    """Drive strength below which no symmetry-broken branch exists."""
    return params.kappa / 2.0


def boundary_g_upper(lam: float, params: ModelParams) -> float:
    """Drive strength at which z_plus reaches -1/2.

    For couplings below the detuning this is where the empty cavity gives
    way to the symmetry-broken phase; it meets kappa/2 exactly at
    lam = |delta|.
    """
    delta = meanfield_detuning(params)
    val = (delta * delta - lam * lam) / delta
    return 0.5 * math.sqrt(params.kappa ** 2 + val * val)


def np_sp_onset(lam: float, params: ModelParams) -> float:
    """Piecewise onset of the symmetry-broken phase along a coupling scan.

    Below lam = |delta| the transition is continuous at boundary_g_upper;
    above it the first root pair appears already at kappa/2 and the
    transition is discontinuous there.
    """
    delta = meanfield_detuning(params)
    if lam <= abs(delta):
        return boundary_g_upper(lam, params)
    return boundary_g_lower(params)


def classify_phase(params: ModelParams) -> PhaseResult:
    """Count stable fixed points and name the phase regime.

    Marginal points are not counted as stable, so classification does not
    flicker on the measure-zero boundary lines.
    """
    stable = [fp for fp in fixed_points(params) if fp.stable]
    if not stable:
        raise NoStableSolution(f"no stable fixed point at {params}")
    n_np = sum(1 for fp in stable if not fp.branch.is_superradiant)
    n_sp = sum(1 for fp in stable if fp.branch.is_superradiant)
    if n_np and n_sp:
        label = PhaseLabel.COEXISTENCE
    elif n_sp:
        label = PhaseLabel.SUPERRADIANT
    else:
        label = PhaseLabel.NORMAL
    return PhaseResult(label=label, n_stable=len(stable))


def branch_map(points: list) -> dict:
    """Index fixed points by branch label; missing branches map to None."""
    out = {label: None for label in ALL_BRANCHES}
    for fp in points:
        out[fp.branch] = fp
    return out
