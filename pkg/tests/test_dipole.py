import numpy as np
import pytest
from scipy import constants

from floquetdd.bath import AtomGeometry, BathParams, gamma_thermal_pair, gamma_thermal_single, omega_dd
from floquetdd.dipole import (
    build_channels,
    build_D_operators,
    build_hdp2,
    coupling_coefficients,
    diagonalize_dissipator,
    dissipator_blocks,
    dissipator_superoperator,
    matrix_elements,
    quasienergy_difference_classes,
)
from floquetdd.errors import NonCompletelyPositiveError, SidebandTruncationError
from floquetdd.floquet import DriveParams, TimeGrid, dressed_states, floquet_solve
from floquetdd.lindblad import coarse_grained_coefficients

E_A0 = constants.e * constants.physical_constants["Bohr radius"][0]
OMEGA = 1e10
RYDBERG = AtomGeometry(separation=40e-6, dipole_mag=1000 * E_A0, theta_d=np.pi / 2)
VACUUM = BathParams(temperature=0.0)


def solve(rabi, omega_eg, n=1024):
    drive = DriveParams(omega=OMEGA, rabi=rabi, omega_eg=omega_eg)
    return floquet_solve(drive, TimeGrid.for_drive(drive, n))


@pytest.fixture(scope="module")
def undriven():
    sol = solve(0.0, 0.3 * OMEGA)
    return sol, matrix_elements(sol)


@pytest.fixture(scope="module")
def resonant_weak():
    sol = solve(0.01 * OMEGA, OMEGA)
    return sol, matrix_elements(sol)


@pytest.fixture(scope="module")
def driven_detuned():
    sol = solve(0.2 * OMEGA, 0.9 * OMEGA)
    return sol, matrix_elements(sol)


class TestMatrixElements:
    def test_undriven_cross_element_is_kronecker(self, undriven):
        _, table = undriven
        for m in range(-table.truncation, table.truncation + 1):
            expected = 1.0 if m == 0 else 0.0
            assert abs(table.entry(1, 0, m)) == pytest.approx(expected, abs=1e-12)

    def test_weak_resonant_diagonal_element(self, resonant_weak):
        # Oracle: dressed modes give <phi_+|sx|phi_+> = sin(theta) cos(w t),
        # so the +-1 sidebands carry sin(theta)/2 = 1/2 on resonance.
        _, table = resonant_weak
        assert abs(table.entry(0, 0, 1)) == pytest.approx(0.5, abs=1e-4)
        assert abs(table.entry(0, 0, -1)) == pytest.approx(0.5, abs=1e-4)

    def test_weak_resonant_cross_element_folded_positions(self, resonant_weak):
        # With mu_+ folded below the zone edge the (-,+) element sits at
        # m = 0 (weight sin^2(theta/2)) and m = +2 (weight cos^2(theta/2)).
        # the cross element carries a first-order counter-rotating
        # correction ~ rabi / (4 omega), hence the looser tolerance
        _, table = resonant_weak
        assert abs(table.entry(1, 0, 0)) == pytest.approx(0.5, abs=2e-3)
        assert abs(table.entry(1, 0, 2)) == pytest.approx(0.5, abs=2e-3)
        assert abs(table.entry(1, 0, 1)) < 1e-5

    def test_sum_rule(self, driven_detuned):
        _, table = driven_detuned
        for beta in (0, 1):
            assert table.column_weight(beta) == pytest.approx(1.0, abs=1e-10)

    def test_conjugation_symmetry(self, driven_detuned):
        _, table = driven_detuned
        for alpha in (0, 1):
            for beta in (0, 1):
                for m in (-5, -1, 0, 1, 2, 7):
                    assert table.entry(alpha, beta, m) == pytest.approx(
                        np.conj(table.entry(beta, alpha, -m)), abs=1e-12
                    )

    def test_nyquist_cutoff_rejected(self, undriven):
        sol, _ = undriven
        with pytest.raises(ValueError):
            matrix_elements(sol, truncation=sol.grid.n_samples // 2)


class TestCouplingCoefficients:
    def test_undriven_limit(self, undriven):
        sol, table = undriven
        coeff = coupling_coefficients(table, sol, RYDBERG)
        assert coeff.c_pp == 0.0
        assert coeff.c_pm == pytest.approx(omega_dd(0.3 * OMEGA, RYDBERG), rel=1e-12)

    def test_weak_resonant_matches_coarse_grained(self, resonant_weak):
        # Oracle: the time-averaged flip-flop closed forms at theta = pi/2.
        sol, table = resonant_weak
        coeff = coupling_coefficients(table, sol, RYDBERG)
        theta = dressed_states(sol.drive).theta_m
        cg_pp, cg_pm = coarse_grained_coefficients(theta, omega_dd(OMEGA, RYDBERG))
        assert coeff.c_pp == pytest.approx(cg_pp, rel=0.02)
        assert coeff.c_pm == pytest.approx(cg_pm, rel=0.02)

    def test_vanishing_drive_limit_theta_zero(self):
        # rabi -> 0 with negative detuning: theta -> 0, c_pp -> 0, c_pm -> W.
        sol = solve(1e-4 * OMEGA, 1.6 * OMEGA)
        table = matrix_elements(sol)
        coeff = coupling_coefficients(table, sol, RYDBERG)
        assert abs(coeff.c_pp) < 1e-6 * abs(coeff.c_pm)
        assert coeff.c_pm == pytest.approx(omega_dd(1.6 * OMEGA, RYDBERG), rel=1e-4)

    def test_breakdown_sums_to_totals(self, driven_detuned):
        sol, table = driven_detuned
        coeff = coupling_coefficients(table, sol, RYDBERG)
        assert coeff.breakdown_pp.sum() == coeff.c_pp
        assert coeff.breakdown_pm.sum() == coeff.c_pm
        assert np.isreal(coeff.c_pp) and np.isreal(coeff.c_pm)

    def test_unconverged_table_rejected(self):
        sol = solve(0.5 * OMEGA, OMEGA)
        tight = matrix_elements(sol, truncation=3)
        with pytest.raises(SidebandTruncationError):
            coupling_coefficients(tight, sol, RYDBERG)


class TestBuildHdp2:
    def test_eigenvalues(self):
        from floquetdd.dipole import CouplingCoefficients

        coeff = CouplingCoefficients(
            c_pp=2.0,
            c_pm=0.5,
            m_values=np.array([0]),
            breakdown_pp=np.array([2.0]),
            breakdown_pm=np.array([0.5]),
        )
        h = build_hdp2(coeff)
        np.testing.assert_allclose(h, h.conj().T)
        eigs = np.sort(np.linalg.eigvalsh(h))
        np.testing.assert_allclose(eigs, [-2.5, -1.5, 2.0, 2.0], atol=1e-14)

    def test_central_block_for_equal_coefficients(self):
        from floquetdd.dipole import CouplingCoefficients

        w = 3.0
        coeff = CouplingCoefficients(
            c_pp=w / 2,
            c_pm=w / 2,
            m_values=np.array([0]),
            breakdown_pp=np.array([w / 2]),
            breakdown_pm=np.array([w / 2]),
        )
        h = build_hdp2(coeff)
        block = h[1:3, 1:3]
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(block)), [-w, 0.0], atol=1e-14)

    def test_undriven_reduces_to_flip_flop(self, undriven):
        sol, table = undriven
        coeff = coupling_coefficients(table, sol, RYDBERG)
        h = build_hdp2(coeff)
        w = omega_dd(0.3 * OMEGA, RYDBERG)
        flip_flop = np.zeros((4, 4), dtype=complex)
        flip_flop[1, 2] = flip_flop[2, 1] = w
        np.testing.assert_allclose(h, flip_flop, atol=1e-12 * abs(w))

    def test_exchange_symmetry(self, driven_detuned):
        sol, table = driven_detuned
        coeff = coupling_coefficients(table, sol, RYDBERG)
        h = build_hdp2(coeff)
        swap = np.zeros((4, 4))
        swap[0, 0] = swap[3, 3] = swap[1, 2] = swap[2, 1] = 1.0
        np.testing.assert_allclose(swap @ h @ swap, h, atol=1e-12 * np.abs(h).max())


class TestBuildChannels:
    def test_undriven_vacuum_superradiance(self):
        # omega_eg > omega puts theta at 0: "+" is the excited branch, the
        # surviving decay channels carry Gamma_11 +- Gamma_12 at omega_eg and
        # the upward (heating) channels vanish in vacuum.
        sol = solve(0.0, 1.6 * OMEGA)
        table = matrix_elements(sol)
        channels = build_channels(table, sol, RYDBERG, VACUUM)
        g11 = gamma_thermal_single(1.6 * OMEGA, RYDBERG, VACUUM)
        g12 = gamma_thermal_pair(1.6 * OMEGA, RYDBERG, VACUUM)
        assert channels.rates[0] == pytest.approx(0.0, abs=1e-20)
        assert channels.rates[1] == pytest.approx(0.0, abs=1e-20)
        assert channels.rates[2] == pytest.approx(g11 + g12, rel=1e-10)
        assert channels.rates[3] == pytest.approx(g11 - g12, rel=1e-6)
        assert channels.rates[4] < 1e-12 * channels.rates[2]
        assert channels.rates[5] < 1e-12 * channels.rates[2]

    def test_rate_sum_identity(self, driven_detuned):
        # gamma_3 + gamma_4 = 2 sum_m w_m Gamma_11(m w + mu_+ - mu_-)
        sol, table = driven_detuned
        channels = build_channels(table, sol, RYDBERG, VACUUM)
        delta = sol.mu_plus - sol.mu_minus
        weights = np.abs(table.entries[1, 0, :]) ** 2
        expected = 2.0 * sum(
            w * gamma_thermal_single(m * OMEGA + delta, RYDBERG, VACUUM)
            for w, m in zip(weights, table.m_values)
        )
        assert channels.rates[2] + channels.rates[3] == pytest.approx(expected, rel=1e-12)

    def test_nonnegative_rates_in_vacuum(self, driven_detuned):
        sol, table = driven_detuned
        channels = build_channels(table, sol, RYDBERG, VACUUM)
        assert np.all(channels.rates >= -1e-12 * channels.rates.max())

    def test_jump_operators_are_unit_normalized_combinations(self, undriven):
        sol, table = undriven
        channels = build_channels(table, sol, RYDBERG, VACUUM)
        lower = np.array([[0, 0], [1, 0]], dtype=complex)
        eye = np.eye(2, dtype=complex)
        sym = (np.kron(lower, eye) + np.kron(eye, lower)) / np.sqrt(2)
        np.testing.assert_allclose(channels.operators[2], sym, atol=1e-14)

    def test_matches_generic_diagonalization(self):
        # Oracle: eigendecomposition of the per-(m, delta mu) rate blocks.
        bath = BathParams(temperature=0.05)
        sol = solve(0.2 * OMEGA, 0.9 * OMEGA)
        table = matrix_elements(sol)
        channels = build_channels(table, sol, RYDBERG, bath)
        closed = dissipator_superoperator(list(channels))
        generic = dissipator_superoperator(
            diagonalize_dissipator(dissipator_blocks(table, sol, RYDBERG, bath))
        )
        dev = np.linalg.norm(closed - generic) / np.linalg.norm(closed)
        assert dev < 1e-10


class TestDOperators:
    def test_undriven_lowering_blocks(self, undriven):
        sol, _ = undriven
        # mu_B - mu_A = omega_eg selects the one-atom "-" -> "+" transitions,
        # i.e. the bare lowering operator on each atom (|+> = |g> here).
        ops = build_D_operators([sol, sol], m=0, delta_mu=0.3 * OMEGA)
        plus_from_minus = np.array([[0, 1], [0, 0]], dtype=complex)
        eye = np.eye(2, dtype=complex)
        np.testing.assert_allclose(ops[0], np.kron(plus_from_minus, eye), atol=1e-12)
        np.testing.assert_allclose(ops[1], np.kron(eye, plus_from_minus), atol=1e-12)

    def test_empty_class_returns_zero(self, undriven):
        sol, _ = undriven
        ops = build_D_operators([sol, sol], m=0, delta_mu=0.123 * OMEGA)
        assert all(np.allclose(op, 0.0) for op in ops)

    def test_atom_count_guard(self, undriven):
        sol, _ = undriven
        with pytest.raises(ValueError):
            build_D_operators([sol] * 7, m=0, delta_mu=0.0)

    def test_exchange_degenerate_class_collects_both_projectors(self, driven_detuned):
        # The two-atom spectrum has mu_2 = mu_3 exactly; the delta mu = 0
        # block must hold the population structure of both branches.
        sol, table = driven_detuned
        ops = build_D_operators([sol, sol], m=1, delta_mu=0.0)
        p = table.entry(0, 0, 1)
        m = table.entry(1, 1, 1)
        sz_like = np.diag([p, p, m, m]).astype(complex)
        np.testing.assert_allclose(ops[0], sz_like, atol=1e-12)

    def test_resummation_reconstructs_sigma_x(self, driven_detuned):
        # Oracle: sigma_x expanded directly in the t=0 product Floquet basis.
        sol, table = driven_detuned
        classes = quasienergy_difference_classes([sol, sol], OMEGA)
        totals = [np.zeros((4, 4), dtype=complex) for _ in range(2)]
        for delta_mu in classes:
            for m in range(-table.truncation, table.truncation + 1):
                ops = build_D_operators([sol, sol], m, float(delta_mu))
                for i in (0, 1):
                    totals[i] += ops[i]
        basis = np.stack([sol.modes[0][0], sol.modes[1][0]], axis=1)
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sx_floquet = basis.conj().T @ sx @ basis
        eye = np.eye(2, dtype=complex)
        np.testing.assert_allclose(totals[0], np.kron(sx_floquet, eye), atol=1e-10)
        np.testing.assert_allclose(totals[1], np.kron(eye, sx_floquet), atol=1e-10)

    def test_difference_classes_structure(self, driven_detuned):
        sol, _ = driven_detuned
        classes = quasienergy_difference_classes([sol, sol], OMEGA)
        delta = sol.mu_plus - sol.mu_minus
        expected = np.array([-2 * delta, -delta, 0.0, delta, 2 * delta])
        np.testing.assert_allclose(classes, np.sort(expected), atol=1e-9 * OMEGA)


class TestDiagonalizeDissipator:
    def test_symmetric_block(self):
        a, b = 2.0, 0.5
        d1 = np.diag([1.0, 0.0]).astype(complex)
        d2 = np.diag([0.0, 1.0]).astype(complex)
        channels = diagonalize_dissipator([(np.array([[a, b], [b, a]]), [d1, d2])])
        rates = sorted(rate for rate, _ in channels)
        assert rates == pytest.approx([a - b, a + b])

    def test_no_cross_coupling_keeps_atoms_independent(self):
        d1 = np.diag([1.0, 0.0]).astype(complex)
        d2 = np.diag([0.0, 1.0]).astype(complex)
        channels = diagonalize_dissipator([(np.diag([1.0, 1.0]), [d1, d2])])
        ops = [op for _, op in channels]
        # eigenvectors of the identity can mix, but the superoperator matches
        # the independent-channel one exactly
        got = dissipator_superoperator(channels)
        want = dissipator_superoperator([(1.0, d1), (1.0, d2)])
        np.testing.assert_allclose(got, want, atol=1e-14)

    def test_negative_eigenvalue_rejected(self):
        d1 = np.diag([1.0, 0.0]).astype(complex)
        d2 = np.diag([0.0, 1.0]).astype(complex)
        bad = np.array([[0.1, 1.0], [1.0, 0.1]])
        with pytest.raises(NonCompletelyPositiveError):
            diagonalize_dissipator([(bad, [d1, d2])])

    def test_non_hermitian_rejected(self):
        d1 = np.eye(2, dtype=complex)
        with pytest.raises(ValueError):
            diagonalize_dissipator([(np.array([[1.0, 0.5], [0.0, 1.0]]), [d1, d1])])
