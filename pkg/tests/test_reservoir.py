import math

import numpy as np
import pytest

from ottoref.qmat import ID2, SIGMA_MINUS, SIGMA_X, SIGMA_Y, gibbs_state, tensor_product
from ottoref.reservoir import (
    ReservoirParams,
    analytic_eigensystem,
    bose_einstein_occupation,
    build_generator,
    decay_rates,
    dissipator_superoperator,
    lindblad_channels,
    sector_dissipator_superoperator,
    sector_operators,
    transition_data,
    transition_frequencies,
    two_qubit_hamiltonian,
)

from conftest import paper_reservoir_params, random_density_matrix, random_reservoir_params


def make_params(omega_s=2 * np.pi * 3600.0, omega_a=2 * np.pi * 2200.0,
                coupling=800.0, kappa=20.0, beta_c=None):
    if beta_c is None:
        beta_c = 2.5 / omega_a
    return ReservoirParams(omega_s, omega_a, coupling, kappa, beta_c)


class TestHamiltonian:
    def test_decoupled_is_diagonal(self):
        p = make_params(coupling=0.0)
        h = two_qubit_hamiltonian(p)
        half_sum = 0.5 * p.total_frequency
        half_det = 0.5 * p.detuning
        assert np.allclose(h, np.diag([half_sum, half_det, -half_det, -half_sum]), atol=1e-12)

    def test_hermitian(self):
        h = two_qubit_hamiltonian(make_params())
        assert np.allclose(h, h.conj().T, atol=1e-12)

    def test_resonant_coupling_entries(self):
        p = make_params(omega_s=2 * np.pi * 2200.0, coupling=123.0)
        h = two_qubit_hamiltonian(p)
        assert h[0, 3] == pytest.approx(123.0)
        assert h[1, 2] == pytest.approx(123.0)


class TestEigensystem:
    def test_decoupled_limit(self):
        es = analytic_eigensystem(make_params(coupling=0.0))
        assert es.alpha == 1.0 and es.xi == 0.0
        assert es.energies[3] == pytest.approx(0.5 * make_params().total_frequency)

    def test_negative_detuning_decoupled_limit(self):
        p = make_params(omega_s=2 * np.pi * 1000.0, omega_a=2 * np.pi * 2200.0, coupling=0.0)
        es = analytic_eigensystem(p)
        # |E2> must be the state with positive energy -detuning/2, i.e. |10>
        assert es.energies[2] == pytest.approx(-0.5 * p.detuning)
        assert abs(es.states[2, 2]) == pytest.approx(1.0)

    def test_resonant_limit(self):
        p = make_params(omega_s=2 * np.pi * 2200.0, coupling=200.0)
        es = analytic_eigensystem(p)
        assert es.eta == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert es.delta == pytest.approx(-1 / math.sqrt(2), abs=1e-12)
        middle = es.states[:, 2]
        assert np.allclose(middle, [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0], atol=1e-12)

    def test_spectrum_symmetry_exact(self, rng):
        for _ in range(20):
            es = analytic_eigensystem(random_reservoir_params(rng))
            assert es.energies[0] == -es.energies[3]
            assert es.energies[1] == -es.energies[2]

    def test_coefficient_normalization(self, rng):
        for _ in range(50):
            es = analytic_eigensystem(random_reservoir_params(rng))
            assert es.alpha**2 + es.xi**2 == pytest.approx(1.0, abs=1e-12)
            assert es.eta**2 + es.delta**2 == pytest.approx(1.0, abs=1e-12)

    def test_orthonormality(self, rng):
        for _ in range(20):
            es = analytic_eigensystem(random_reservoir_params(rng))
            gram = es.states.conj().T @ es.states
            assert np.allclose(gram, np.eye(4), atol=1e-12)

    def test_matches_numeric_diagonalization(self, rng):
        for _ in range(100):
            p = random_reservoir_params(rng)
            es = analytic_eigensystem(p)
            h = two_qubit_hamiltonian(p)
            w, v = np.linalg.eigh(h)
            assert np.allclose(es.energies, w, atol=1e-10 * p.total_frequency)
            for k in range(4):
                overlap = abs(np.vdot(v[:, k], es.states[:, k]))
                assert overlap == pytest.approx(1.0, abs=1e-8)


class TestTransitionFrequencies:
    def test_resonant_forms(self):
        p = make_params(omega_s=2 * np.pi * 2200.0, coupling=200.0)
        eps1, eps2 = transition_frequencies(analytic_eigensystem(p))
        root = math.sqrt(p.total_frequency**2 + 4 * p.coupling**2)
        assert eps1 == pytest.approx((root - 2 * p.coupling) / 2, rel=1e-12)
        assert eps2 == pytest.approx((root + 2 * p.coupling) / 2, rel=1e-12)

    def test_decoupled_forms(self):
        p = make_params(coupling=0.0)
        eps1, eps2 = transition_frequencies(analytic_eigensystem(p))
        assert eps1 == pytest.approx(min(p.omega_s, p.omega_a), rel=1e-12)
        assert eps2 == pytest.approx(max(p.omega_s, p.omega_a), rel=1e-12)

    def test_sum_rule(self, rng):
        for _ in range(30):
            p = random_reservoir_params(rng)
            eps1, eps2 = transition_frequencies(analytic_eigensystem(p))
            expected = math.sqrt(p.total_frequency**2 + 4 * p.coupling**2)
            assert eps1 + eps2 == pytest.approx(expected, rel=1e-12)
            assert 0 < eps1 <= eps2

    def test_double_degeneracy(self, rng):
        for _ in range(30):
            es = analytic_eigensystem(random_reservoir_params(rng))
            e = es.energies
            assert e[1] - e[0] == pytest.approx(e[3] - e[2], rel=1e-12)
            assert e[2] - e[0] == pytest.approx(e[3] - e[1], rel=1e-12)


class TestDecayRates:
    def test_unit_occupation_point(self):
        # beta*eps = ln 2 gives n = 1, hence down = kappa and up = kappa/2
        p = make_params()
        eps = math.log(2) / p.beta_c
        down, up = decay_rates(eps, p)
        assert down == pytest.approx(p.kappa, rel=1e-12)
        assert up == pytest.approx(p.kappa / 2, rel=1e-12)

    def test_zero_temperature_limit(self):
        p = make_params()
        eps = 800.0 / p.beta_c  # beta*eps = 800, e^-800 underflows to 0
        down, up = decay_rates(eps, p)
        assert up == 0.0
        assert down == pytest.approx(p.kappa / 2, rel=1e-12)

    def test_detailed_balance(self, rng):
        p = make_params()
        for _ in range(50):
            eps = rng.uniform(0.01, 5.0) / p.beta_c
            down, up = decay_rates(eps, p)
            assert up / down == pytest.approx(math.exp(-p.beta_c * eps), rel=1e-12)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            decay_rates(0.0, make_params())
        with pytest.raises(ValueError):
            bose_einstein_occupation(-1.0, 1.0)


class TestLindbladChannels:
    def test_decoupled_limit_acts_on_auxiliary_only(self):
        p = make_params(coupling=0.0)
        es = analytic_eigensystem(p)
        channels = lindblad_channels(es, transition_data(p, es))
        l1 = channels[0][0]
        assert np.allclose(l1, 2.0 * tensor_product(ID2, SIGMA_MINUS), atol=1e-12)
        l2 = channels[1][0]
        assert np.allclose(l2, 0.0, atol=1e-12)

    def test_channels_lower_between_eigenstates(self, rng):
        p = random_reservoir_params(rng)
        es = analytic_eigensystem(p)
        channels = lindblad_channels(es, transition_data(p, es))
        for op, _ in channels[:2]:
            for m in range(4):
                image = op @ es.states[:, m]
                for n in range(m, 4):
                    # downward operators never map a level to itself or upward
                    assert abs(np.vdot(es.states[:, n], image)) < 1e-10

    def test_rates_ordering(self, rng):
        p = random_reservoir_params(rng)
        es = analytic_eigensystem(p)
        td = transition_data(p, es)
        channels = lindblad_channels(es, td)
        assert channels[0][1] == td.rate_down[0] > td.rate_up[0] == channels[2][1]


class TestSectorOperators:
    def test_displayed_matrix_structure(self, rng):
        p = random_reservoir_params(rng)
        es = analytic_eigensystem(p)
        sectors = sector_operators(es)
        a, x, e, d = es.alpha, es.xi, es.eta, es.delta
        # full coupling operator in the eigenbasis, rebuilt from sectors
        total = sum(sectors[(1, s)] for s in (1, 2, -1, -2))
        eig = es.states.conj().T @ total @ es.states
        expected = np.array(
            [
                [0, a * e - d * x, -(a * d + e * x), 0],
                [a * e - d * x, 0, 0, a * d + e * x],
                [-(a * d + e * x), 0, 0, a * e - d * x],
                [0, a * d + e * x, a * e - d * x, 0],
            ]
        )
        assert np.allclose(eig, expected, atol=1e-10)

    def test_completeness(self, rng):
        es = analytic_eigensystem(random_reservoir_params(rng))
        sectors = sector_operators(es)
        total1 = sum(sectors[(1, s)] for s in (1, 2, -1, -2))
        total2 = sum(sectors[(2, s)] for s in (1, 2, -1, -2))
        assert np.allclose(total1, tensor_product(ID2, SIGMA_X), atol=1e-10)
        assert np.allclose(total2, tensor_product(ID2, SIGMA_Y), atol=1e-10)

    def test_irrelevant_sectors_vanish(self, rng):
        es = analytic_eigensystem(random_reservoir_params(rng))
        projectors = [np.outer(es.states[:, k], es.states[:, k].conj()) for k in range(4)]
        for a_k in (tensor_product(ID2, SIGMA_X), tensor_product(ID2, SIGMA_Y)):
            assert np.allclose(projectors[0] @ a_k @ projectors[3], 0.0, atol=1e-12)
            assert np.allclose(projectors[1] @ a_k @ projectors[2], 0.0, atol=1e-12)

    def test_adjoint_relation(self, rng):
        es = analytic_eigensystem(random_reservoir_params(rng))
        sectors = sector_operators(es)
        for k in (1, 2):
            for s in (1, 2):
                assert np.allclose(sectors[(k, -s)], sectors[(k, s)].conj().T, atol=1e-12)

    def test_resonant_entry_value(self):
        p = make_params(omega_s=2 * np.pi * 2200.0, coupling=200.0)
        es = analytic_eigensystem(p)
        sectors = sector_operators(es)
        entry = np.vdot(es.states[:, 0], sectors[(1, 1)] @ es.states[:, 1])
        expected = es.alpha * es.eta - es.delta * es.xi
        assert entry.real == pytest.approx(expected, rel=1e-12)


class TestDissipatorEquivalence:
    def test_channel_form_equals_sector_double_sum(self, rng):
        for _ in range(20):
            p = random_reservoir_params(rng)
            es = analytic_eigensystem(p)
            channels = lindblad_channels(es, transition_data(p, es))
            diag_form = dissipator_superoperator(channels)
            double_sum = sector_dissipator_superoperator(p)
            assert np.allclose(diag_form, double_sum, atol=1e-10)


class TestGenerator:
    def test_gibbs_state_is_stationary(self):
        for jk in (0.5, 10.0, 40.0):
            p = paper_reservoir_params(jk)
            gen = build_generator(p)
            stationary = gibbs_state(gen.hamiltonian, p.beta_c)
            residual = gen.apply(stationary)
            assert np.abs(residual).max() < 1e-8 * p.kappa

    def test_output_hermitian_traceless(self, rng):
        p = paper_reservoir_params(10.0)
        gen = build_generator(p)
        rho = random_density_matrix(rng, 4)
        out = gen.apply(rho)
        assert np.allclose(out, out.conj().T, atol=1e-10)
        assert abs(np.trace(out)) < 1e-10 * p.kappa

    def test_maximally_mixed_not_stationary(self):
        p = paper_reservoir_params(10.0)
        gen = build_generator(p)
        out = gen.apply(np.eye(4, dtype=complex) / 4)
        assert np.abs(out).max() > 1e-3 * p.kappa

    def test_trace_functional_annihilated(self, rng):
        # column sums of the trace components vanish: Tr[L(rho)] = 0 for all rho
        p = random_reservoir_params(rng)
        gen = build_generator(p)
        trace_vec = np.zeros(16)
        trace_vec[[0, 5, 10, 15]] = 1.0
        scale = max(np.abs(gen.liouvillian).max(), 1.0)
        assert np.abs(trace_vec @ gen.liouvillian).max() < 1e-12 * scale

    def test_null_space_is_gibbs_only(self):
        for jk in (0.5, 10.0, 40.0):
            p = paper_reservoir_params(jk)
            gen = build_generator(p)
            u, s, vh = np.linalg.svd(gen.liouvillian)
            scale = s[0]
            assert s[-1] < 1e-10 * scale         # one null direction
            assert s[-2] > 1e-6 * scale          # and only one
            null_vec = vh[-1].conj()
            null_mat = null_vec.reshape(4, 4)
            null_mat /= np.trace(null_mat)
            stationary = gibbs_state(gen.hamiltonian, p.beta_c)
            assert np.abs(null_mat - stationary).max() < 1e-8

    def test_decoupled_refrigerant_untouched(self, rng):
        p = make_params(coupling=0.0)
        gen = build_generator(p)
        rho_s = np.diag([0.3, 0.7]).astype(complex)
        rho_a = random_density_matrix(rng, 2)
        out = gen.apply(tensor_product(rho_s, rho_a))
        reduced = np.einsum("ikjk->ij", out.reshape(2, 2, 2, 2))
        assert np.abs(reduced).max() < 1e-12 * p.kappa


class TestParams:
    def test_from_ratio(self):
        p = ReservoirParams.from_ratio(100.0, 90.0, 0.5, 20.0, 1.0)
        assert p.coupling == 10.0

    def test_validation(self):
        with pytest.raises(ValueError):
            ReservoirParams(0.0, 1.0, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            ReservoirParams(1.0, 1.0, -1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            ReservoirParams(1.0, 1.0, 0.0, 1.0, -1.0)
