import numpy as np
import pytest

from ottoref.reservoir import ReservoirParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_density_matrix(rng, dim):
    """Full-rank random state from a Ginibre matrix."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


def random_reservoir_params(rng):
    """Physically sensible random reservoir parameters."""
    omega_s = 2 * np.pi * rng.uniform(500.0, 5000.0)
    omega_a = 2 * np.pi * rng.uniform(500.0, 5000.0)
    kappa = rng.uniform(5.0, 100.0)
    j_over_kappa = rng.uniform(0.0, 50.0)
    beta_c = rng.uniform(0.1, 4.0) / omega_s
    return ReservoirParams.from_ratio(omega_s, omega_a, j_over_kappa, kappa, beta_c)


def paper_reservoir_params(j_over_kappa):
    """Cold-contact reservoir at the default cycle parameters."""
    omega = 2 * np.pi * 2200.0
    return ReservoirParams.from_ratio(omega, omega, j_over_kappa, 20.0, 2.5 / omega)
