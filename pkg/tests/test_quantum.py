"""Master-equation steady states, dynamics, and Wigner reconstruction."""

import numpy as np
import pytest

from srlab import quantum
from srlab.errors import CutoffTooSmall
from srlab.params import ModelParams
from srlab.quantum import (
    HilbertSpec,
    WignerGrid,
    build_hamiltonian,
    build_liouvillian,
    cavity_field,
    collective_spin,
    mean_photon,
    reduced_cavity,
    spin_lowering,
    spin_operators,
    spin_raising,
    spin_z,
    steady_state,
    time_evolve,
    wigner,
    wigner_cavity,
)

KAPPA = 0.5


def params(lam, g, n_atoms=2, delta=5.0, delta_c=None, gamma=0.001):
    dc = delta if delta_c is None else delta_c
    return ModelParams(delta_c=dc, delta_a=delta, coupling=lam, g_drive=g,
                       kappa=KAPPA, gamma=gamma, n_atoms=n_atoms)


class TestOperators:
    @pytest.mark.parametrize("n", [1, 2, 4, 7])
    def test_spin_algebra(self, n):
        sz, sp, sm = spin_operators(n)
        j = n / 2
        s2 = sz @ sz + 0.5 * (sp @ sm + sm @ sp)
        np.testing.assert_allclose(s2, j * (j + 1) * np.eye(n + 1),
                                   rtol=0, atol=1e-12)
        np.testing.assert_allclose(sp @ sm - sm @ sp, 2 * sz,
                                   rtol=0, atol=1e-12)

    def test_field_commutator_below_cutoff(self):
        spec = HilbertSpec(1, 10)
        a = cavity_field(spec)
        comm = a @ a.conj().T - a.conj().T @ a
        # truncation necessarily breaks the identity in the last level
        interior = comm[: spec.dim - spec.spin_dim, : spec.dim - spec.spin_dim]
        np.testing.assert_allclose(np.diag(interior)[:9], 1.0,
                                   rtol=0, atol=1e-14)

    def test_hamiltonian_hermitian(self):
        spec = HilbertSpec(3, 8)
        h = build_hamiltonian(params(4.5, 0.6, n_atoms=3), spec)
        np.testing.assert_allclose(h, h.conj().T, rtol=0, atol=0)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            HilbertSpec(0, 10)
        with pytest.raises(ValueError):
            HilbertSpec(13, 10)
        with pytest.raises(ValueError):
            HilbertSpec(2, 0)
        with pytest.raises(ValueError):
            HilbertSpec(2.5, 10)

    def test_atom_number_mismatch_rejected(self):
        with pytest.raises(ValueError):
            build_hamiltonian(params(1.0, 0.1, n_atoms=3), HilbertSpec(2, 6))


class TestLiouvillian:
    def test_expectation_flow_of_field(self):
        # d<a>/dt from the generator must match the operator equation term
        # by term, including the two-photon drive and the collective decay
        p = params(3.0, 0.3, delta=4.0, delta_c=5.0)
        spec = HilbertSpec(2, 12)
        rng = np.random.default_rng(7)
        sd, fd, keep = spec.spin_dim, spec.fock_dim, 5
        c = rng.normal(size=(sd * keep, sd * keep)) \
            + 1j * rng.normal(size=(sd * keep, sd * keep))
        small = c @ c.conj().T
        small /= np.trace(small)
        rho = np.zeros((spec.dim, spec.dim), dtype=complex)
        for s1 in range(sd):
            for s2 in range(sd):
                rho[s1 * fd:s1 * fd + keep, s2 * fd:s2 * fd + keep] = \
                    small[s1 * keep:(s1 + 1) * keep,
                          s2 * keep:(s2 + 1) * keep]
        liou = build_liouvillian(p, spec)
        drho = (liou @ rho.reshape(-1)).reshape(spec.dim, spec.dim)
        a = cavity_field(spec)
        lhs = np.trace(a @ drho)
        rhs = (-(1j * p.delta_c + p.kappa) * np.trace(a @ rho)
               - 2j * p.g_drive * np.trace(a.conj().T @ rho)
               - 1j * (p.coupling / np.sqrt(p.n_atoms))
               * np.trace(spin_lowering(spec) @ rho))
        assert abs(lhs - rhs) < 1e-12

    def test_undriven_cavity_stays_dark(self):
        p = params(4.5, 0.0)
        spec = HilbertSpec(2, 10)
        rho = steady_state(p, spec)
        assert mean_photon(rho, spec) < 1e-10


class TestSteadyState:
    def test_density_matrix_properties(self):
        p = params(4.5, 0.4)
        spec = HilbertSpec(2, 15)
        rho = steady_state(p, spec)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-8
        liou = build_liouvillian(p, spec)
        resid = np.abs(liou @ rho.reshape(-1)).max()
        assert resid < 1e-9 * np.abs(liou.data).max()

    def test_decoupled_spins_squeezed_occupation(self):
        # empty-cavity photon number has an exact two-term closed form
        for g in (0.05, 0.1):
            p = params(0.0, g, n_atoms=1, delta=0.0)
            spec = HilbertSpec(1, 20)
            n = mean_photon(steady_state(p, spec), spec)
            expect = (KAPPA / (4 * (KAPPA + 2 * g))
                      + KAPPA / (4 * (KAPPA - 2 * g)) - 0.5)
            assert n == pytest.approx(expect, abs=1e-9)

    def test_coexistence_point_regression(self):
        p = params(7.0, 0.6, n_atoms=4)
        spec = HilbertSpec(4, 20)
        rho = steady_state(p, spec)
        assert mean_photon(rho, spec) == pytest.approx(0.99509433, rel=1e-6)
        sx, sy, sz = collective_spin(rho, spec)
        assert abs(sx) < 1e-8
        assert abs(sy) < 1e-8
        assert sz == pytest.approx(-1.489021, rel=1e-5)

    def test_ground_state_spin(self):
        p = params(0.0, 0.0, n_atoms=2)
        spec = HilbertSpec(2, 4)
        sx, sy, sz = collective_spin(steady_state(p, spec), spec)
        assert (sx, sy) == (pytest.approx(0.0, abs=1e-10),) * 2
        assert sz == pytest.approx(-1.0, abs=1e-9)

    def test_cutoff_convergence_monotone(self):
        p = params(4.5, 0.4)
        ns = quantum.cutoff_convergence(p, (10, 15, 20, 25))
        diffs = np.abs(np.diff(ns))
        assert ns[-1] == pytest.approx(0.06771283, rel=1e-6)
        assert diffs[0] > diffs[1] > diffs[2]


class TestTimeEvolve:
    def test_bare_cavity_decay(self):
        p = params(0.0, 0.0, n_atoms=1, delta=0.0, gamma=0.0)
        spec = HilbertSpec(1, 6)
        rho0 = np.zeros((spec.dim, spec.dim), dtype=complex)
        one_photon = 1 * spec.fock_dim + 1  # spin ground, Fock level 1
        rho0[one_photon, one_photon] = 1.0
        times = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
        states = time_evolve(p, spec, rho0, times)
        for t, rho in zip(times, states):
            n = mean_photon(rho, spec)
            assert n == pytest.approx(np.exp(-2 * KAPPA * t), rel=1e-6)

    def test_relaxes_to_steady_state(self):
        p = params(4.5, 0.4)
        spec = HilbertSpec(2, 15)
        rho_ss = steady_state(p, spec)
        rho0 = np.eye(spec.dim, dtype=complex) / spec.dim
        states = time_evolve(p, spec, rho0, np.array([0.0, 30.0, 60.0]))
        assert np.abs(states[-1] - rho_ss).max() < 5e-8

    def test_input_validation(self):
        p = params(1.0, 0.1)
        spec = HilbertSpec(2, 5)
        rho0 = np.eye(spec.dim, dtype=complex) / spec.dim
        with pytest.raises(ValueError):
            time_evolve(p, spec, rho0, np.array([0.0]))
        with pytest.raises(ValueError):
            time_evolve(p, spec, rho0, np.array([0.0, 2.0, 1.0]))
        with pytest.raises(ValueError):
            time_evolve(p, spec, np.eye(3, dtype=complex) / 3,
                        np.array([0.0, 1.0]))


class TestReduction:
    def test_reduced_cavity_matches_partial_trace(self):
        p = params(4.5, 0.4)
        spec = HilbertSpec(2, 10)
        rho = steady_state(p, spec)
        rc = reduced_cavity(rho, spec)
        manual = np.zeros((spec.fock_dim, spec.fock_dim), dtype=complex)
        for s in range(spec.spin_dim):
            block = slice(s * spec.fock_dim, (s + 1) * spec.fock_dim)
            manual += rho[block, block]
        np.testing.assert_allclose(rc, manual, rtol=0, atol=1e-15)
        assert np.trace(rc).real == pytest.approx(1.0, abs=1e-12)


class TestWigner:
    def test_vacuum(self):
        rc = np.zeros((5, 5), dtype=complex)
        rc[0, 0] = 1.0
        wg = wigner_cavity(rc)
        mid = len(wg.xs) // 2
        assert wg.values[mid, mid] == pytest.approx(2 / np.pi, abs=1e-10)
        assert wg.integral() == pytest.approx(1.0, abs=1e-6)
        assert wg.count_maxima() == 1

    def test_squeezed_second_moments(self):
        # quadrature variances of the squeezed cavity, k/(2(k +- 2G)),
        # show up in phase space at half weight along the diagonals
        g = 0.2
        p = params(0.0, g, n_atoms=1, delta=0.0)
        spec = HilbertSpec(1, 30)
        rc = reduced_cavity(steady_state(p, spec), spec)
        ax = np.linspace(-6.0, 6.0, 121)
        wg = wigner_cavity(rc, ax, ax)
        assert wg.integral() == pytest.approx(1.0, abs=1e-3)
        xg, yg = np.meshgrid(wg.xs, wg.ys)

        def moment(f):
            return np.trapezoid(np.trapezoid(f * wg.values, wg.xs, axis=1),
                                wg.ys)

        m = np.array([[moment(xg * xg), moment(xg * yg)],
                      [moment(xg * yg), moment(yg * yg)]])
        got = np.sort(np.linalg.eigvalsh(m))
        expect = np.sort([KAPPA / (4 * (KAPPA + 2 * g)),
                          KAPPA / (4 * (KAPPA - 2 * g))])
        np.testing.assert_allclose(got, expect, rtol=5e-3)

    def test_parity_symmetry(self):
        # the generator is invariant under a -> -a, so the steady-state
        # distribution must carry that symmetry exactly
        p = params(7.0, 0.6)
        spec = HilbertSpec(2, 25)
        rho = steady_state(p, spec)
        ax = np.linspace(-3.0, 3.0, 41)
        wg = wigner(rho, spec, ax, ax)
        assert np.abs(wg.values - wg.values[::-1, ::-1]).max() < 1e-10

    def test_wrapper_matches_reduced_call(self):
        p = params(4.5, 0.4)
        spec = HilbertSpec(2, 12)
        rho = steady_state(p, spec)
        ax = np.linspace(-2.0, 2.0, 21)
        a = wigner(rho, spec, ax, ax)
        b = wigner_cavity(reduced_cavity(rho, spec), ax, ax)
        np.testing.assert_allclose(a.values, b.values, rtol=0, atol=1e-14)

    def test_top_heavy_state_rejected(self):
        rc = np.zeros((9, 9), dtype=complex)
        rc[8, 8] = 1.0
        with pytest.raises(CutoffTooSmall):
            wigner_cavity(rc)

    def test_maxima_floor(self):
        ax = np.linspace(-3.0, 3.0, 61)
        xg, yg = np.meshgrid(ax, ax)
        vals = (np.exp(-4 * ((xg - 1) ** 2 + yg ** 2))
                + 0.8 * np.exp(-4 * ((xg + 1) ** 2 + yg ** 2))
                + 0.005 * np.exp(-4 * (xg ** 2 + (yg - 2) ** 2)))
        wg = WignerGrid(ax, ax, vals)
        assert wg.count_maxima() == 2
        found = {(round(x, 6), round(y, 6)) for x, y, _ in wg.maxima()}
        assert found == {(1.0, 0.0), (-1.0, 0.0)}
