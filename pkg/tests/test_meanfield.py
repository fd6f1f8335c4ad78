"""Steady-state branches, phase boundaries, and classification."""

import math

import numpy as np
import pytest

from srlab import core, meanfield
from srlab.errors import NoStableSolution, OffShell, ZeroCoupling
from srlab.params import BranchLabel, ModelParams, PhaseLabel

KAPPA, DELTA = 0.5, 5.0


def params(lam, g, **kw):
    base = dict(delta_c=DELTA, delta_a=DELTA, coupling=lam, g_drive=g,
                kappa=KAPPA)
    base.update(kw)
    return ModelParams(**base)


def z_closed(lam, g, sign):
    """Spin-projection roots written out independently."""
    disc = 4 * g * g - KAPPA * KAPPA
    return (DELTA / (2 * lam * lam)) * (-DELTA + sign * math.sqrt(disc))


class TestZBranches:
    def test_matches_closed_form(self):
        zp, zm = meanfield.z_branches(params(7.0, 0.5))
        assert zp == pytest.approx(z_closed(7.0, 0.5, +1), abs=1e-14)
        assert zm == pytest.approx(z_closed(7.0, 0.5, -1), abs=1e-14)

    def test_no_roots_below_drive_threshold(self):
        assert meanfield.z_branches(params(7.0, 0.2)) == ()

    def test_single_root_at_exact_threshold(self):
        roots = meanfield.z_branches(params(7.0, 0.25))
        assert len(roots) == 1
        assert roots[0] == pytest.approx(-DELTA * DELTA / (2 * 49.0),
                                         abs=1e-14)

    def test_zero_coupling_rejected(self):
        with pytest.raises(ZeroCoupling):
            meanfield.z_branches(params(0.0, 0.5))


class TestAlphaFromZ:
    def test_off_shell_rejected(self):
        # at coupling below the detuning the threshold root lies outside
        # the spin sphere: z = -25/40.5
        z = z_closed(4.5, 0.25, +1)
        assert abs(z) > 0.5
        with pytest.raises(OffShell):
            meanfield.alpha_from_z(z, params(4.5, 0.25))

    def test_pair_is_mirror_symmetric(self):
        z = z_closed(4.5, 0.6, +1)
        pos, neg = meanfield.alpha_from_z(z, params(4.5, 0.6))
        np.testing.assert_allclose(pos.as_array()[:4], -neg.as_array()[:4],
                                   rtol=0, atol=0)
        assert pos.z == neg.z
        assert pos.alpha_re > 0

    def test_states_satisfy_equations(self):
        p = params(4.5, 0.6)
        z = z_closed(4.5, 0.6, +1)
        for st in meanfield.alpha_from_z(z, p):
            assert np.abs(core.semiclassical_rhs(st, p)).max() < 1e-12
            assert core.spin_norm(st) == pytest.approx(0.25, abs=1e-12)


class TestFixedPoints:
    def test_superradiant_point_values(self):
        # frozen output of the closed-form construction plus Newton polish
        pts = meanfield.branch_map(meanfield.fixed_points(params(4.5, 0.6)))
        st = pts[BranchLabel.SP_PLUS_POS].state
        expect = (0.03208895, -0.14702329, -0.02787552, -0.12771844,
                  -0.48260849)
        np.testing.assert_allclose(st.as_array(), expect, rtol=0, atol=1e-7)

    def test_branch_census_above_detuning(self):
        # strong coupling, coexistence drive: both poles plus both mirror
        # pairs of both superradiant roots are on the sphere
        pts = meanfield.fixed_points(params(7.0, 0.5))
        labels = sorted(fp.branch.value for fp in pts)
        assert labels == ["np_down", "np_up", "sp_minus_neg", "sp_minus_pos",
                          "sp_plus_neg", "sp_plus_pos"]
        by = meanfield.branch_map(pts)
        assert by[BranchLabel.NP_DOWN].stable
        assert by[BranchLabel.SP_PLUS_POS].stable
        assert by[BranchLabel.SP_PLUS_NEG].stable
        assert not by[BranchLabel.SP_MINUS_POS].stable
        assert not by[BranchLabel.NP_UP].stable

    def test_branch_census_below_detuning(self):
        # moderate coupling: the minus root is off the sphere entirely
        pts = meanfield.fixed_points(params(4.5, 0.6))
        labels = sorted(fp.branch.value for fp in pts)
        assert labels == ["np_down", "np_up", "sp_plus_neg", "sp_plus_pos"]
        by = meanfield.branch_map(pts)
        assert not by[BranchLabel.NP_DOWN].stable  # above the onset
        assert by[BranchLabel.SP_PLUS_POS].stable

    def test_all_residuals_polished(self):
        for lam, g in ((4.5, 0.6), (7.0, 0.5), (7.0, 0.3), (3.0, 0.9)):
            p = params(lam, g)
            for fp in meanfield.fixed_points(p):
                res = np.abs(core.semiclassical_rhs(fp.state, p)).max()
                assert res < 1e-11, (lam, g, fp.branch)

    def test_spin_shell_exact(self):
        for fp in meanfield.fixed_points(params(7.0, 0.5)):
            assert core.spin_norm(fp.state) == pytest.approx(0.25,
                                                             abs=1e-12)


class TestBoundaries:
    def test_lower_boundary(self):
        assert meanfield.boundary_g_lower(params(4.5, 0.0)) == KAPPA / 2

    def test_upper_boundary_closed_form(self):
        for lam in (2.0, 4.5, 5.0, 7.0, 9.0):
            expect = 0.5 * math.sqrt(
                KAPPA ** 2 + (DELTA ** 2 - lam ** 2) ** 2 / DELTA ** 2)
            got = meanfield.boundary_g_upper(lam, params(lam, 0.0))
            assert got == pytest.approx(expect, abs=1e-14)

    def test_onset_is_piecewise(self):
        p = params(2.0, 0.0)
        assert meanfield.np_sp_onset(4.5, p) == pytest.approx(
            0.5367727638395972, abs=1e-12)
        assert meanfield.np_sp_onset(7.0, p) == KAPPA / 2
        # the pieces meet exactly at coupling equal to detuning
        assert meanfield.np_sp_onset(5.0, p) == KAPPA / 2
        assert meanfield.boundary_g_upper(5.0, p) == KAPPA / 2


class TestClassifyPhase:
    def test_phases(self):
        assert meanfield.classify_phase(params(4.5, 0.2)).label \
            is PhaseLabel.NORMAL
        r = meanfield.classify_phase(params(4.5, 0.6))
        assert r.label is PhaseLabel.SUPERRADIANT
        assert r.n_stable == 2
        r = meanfield.classify_phase(params(7.0, 0.5))
        assert r.label is PhaseLabel.COEXISTENCE
        assert r.n_stable == 3

    def test_nothing_stable_is_an_error(self):
        # exactly at the tricritical point the only candidate is marginal
        with pytest.raises(NoStableSolution):
            meanfield.classify_phase(params(5.0, 0.25))


class TestRandomDraws:
    def test_plus_branch_stable_minus_never(self):
        rng = np.random.default_rng(20260817)
        checked_plus = checked_minus = 0
        for _ in range(150):
            p = params(rng.uniform(2, 9), rng.uniform(0, 1.2))
            for fp in meanfield.fixed_points(p):
                if fp.branch.is_superradiant and fp.branch.is_plus_branch:
                    if not fp.marginal:
                        assert fp.stable, p
                        checked_plus += 1
                elif fp.branch.is_superradiant:
                    assert not fp.stable, p
                    checked_minus += 1
        assert checked_plus > 50
        assert checked_minus > 20
