"""Engineered cold reservoir: two-qubit Hamiltonian, analytic eigensystem,
detailed-balance rates, Lindblad channels and the full GKSL generator.

The reservoir seen by the refrigerant S is an auxiliary qubit A damped by
a flat Markovian bosonic bath at inverse temperature beta_c.  The joint
SA pair then evolves under a four-channel Lindblad equation whose jump
operators connect the dressed eigenstates of the coupled Hamiltonian.

Product-basis ordering is |00>, |01>, |10>, |11| with the first slot the
refrigerant and the second the auxiliary qubit; |0> is the excited state
of (omega/2) sigma_z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qmat import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z, dagger, tensor_product

__all__ = [
    "ReservoirParams",
    "EigenSystem",
    "TransitionData",
    "GKSLGenerator",
    "two_qubit_hamiltonian",
    "analytic_eigensystem",
    "transition_frequencies",
    "bose_einstein_occupation",
    "decay_rates",
    "transition_data",
    "lindblad_channels",
    "sector_operators",
    "dissipator_superoperator",
    "sector_dissipator_superoperator",
    "build_generator",
]


@dataclass(frozen=True)
class ReservoirParams:
    """Physical constants of the engineered cold reservoir.

    omega_s, omega_a : qubit gaps in rad/s (> 0)
    coupling         : qubit-qubit coupling J in rad/s (>= 0)
    kappa            : vacuum decay rate of the auxiliary-bath contact, 1/s
    beta_c           : inverse temperature of the Markovian bath, s
    """

    omega_s: float
    omega_a: float
    coupling: float
    kappa: float
    beta_c: float

    def __post_init__(self):
        if self.omega_s <= 0 or self.omega_a <= 0:
            raise ValueError("qubit gaps must be positive")
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.beta_c <= 0:
            raise ValueError("beta_c must be positive")

    @property
    def detuning(self) -> float:
        """omega_s - omega_a."""
        return self.omega_s - self.omega_a

    @property
    def total_frequency(self) -> float:
        """omega_s + omega_a."""
        return self.omega_s + self.omega_a

    @classmethod
    def from_ratio(cls, omega_s, omega_a, j_over_kappa, kappa, beta_c):
        """Build params with the coupling given as the ratio J/kappa."""
        return cls(omega_s, omega_a, j_over_kappa * kappa, kappa, beta_c)


@dataclass(frozen=True)
class EigenSystem:
    """Closed-form eigensystem of the coupled two-qubit Hamiltonian.

    energies : the four eigenvalues in ascending order (rad/s); the
        spectrum is symmetric, energies[0] = -energies[3] and
        energies[1] = -energies[2].
    states   : unit column vectors, states[:, k] belongs to energies[k].
    alpha, xi : amplitudes of the top/bottom pair on |00> and |11>.
    eta, delta : amplitudes of the middle pair on |01> and |10>.
    """

    energies: np.ndarray
    states: np.ndarray
    alpha: float
    xi: float
    eta: float
    delta: float


@dataclass(frozen=True)
class TransitionData:
    """Bath-visible transition frequencies and their detailed-balance rates.

    Index 0 refers to the lower frequency eps1, index 1 to eps2.
    rate_down/rate_up are in 1/s, occupation is the Bose-Einstein number.
    """

    eps1: float
    eps2: float
    rate_down: tuple[float, float]
    rate_up: tuple[float, float]
    occupation: tuple[float, float]


def two_qubit_hamiltonian(params: ReservoirParams) -> np.ndarray:
    """(omega_s/2) sigma_z (x) 1 + (omega_a/2) 1 (x) sigma_z + J sigma_x (x) sigma_x."""
    return (
        0.5 * params.omega_s * tensor_product(SIGMA_Z, ID2)
        + 0.5 * params.omega_a * tensor_product(ID2, SIGMA_Z)
        + params.coupling * tensor_product(SIGMA_X, SIGMA_X)
    )


def interaction_hamiltonian(params: ReservoirParams) -> np.ndarray:
    """The coupling term J sigma_x (x) sigma_x alone."""
    return params.coupling * tensor_product(SIGMA_X, SIGMA_X)


def analytic_eigensystem(params: ReservoirParams) -> EigenSystem:
    """Closed-form eigenvalues and eigenvectors of the coupled pair.

    The top/bottom eigenstates live in span{|00>, |11>} with amplitudes
    (alpha, xi); the middle pair lives in span{|01>, |10>} with
    amplitudes (eta, delta).  Both pairs of amplitudes are normalized.
    """
    j = params.coupling
    delta_f = params.detuning
    omega_sum = params.total_frequency
    root_sum = math.sqrt(4.0 * j * j + omega_sum * omega_sum)
    root_det = math.sqrt(4.0 * j * j + delta_f * delta_f)

    if j == 0.0:
        # Degenerate limits of the closed forms (0/0 for delta_f <= 0).
        alpha, xi = 1.0, 0.0
        eta, dlt = (1.0, 0.0) if delta_f >= 0 else (0.0, -1.0)
    else:
        num = omega_sum + root_sum
        den = math.hypot(2.0 * j, num)
        alpha, xi = num / den, 2.0 * j / den
        num = delta_f + root_det
        if delta_f < 0:
            # Conjugate form avoids cancellation when delta_f << -J.
            num = 4.0 * j * j / (root_det - delta_f)
        den = math.hypot(2.0 * j, num)
        eta, dlt = num / den, -2.0 * j / den

    energies = np.array([-0.5 * root_sum, -0.5 * root_det, 0.5 * root_det, 0.5 * root_sum])
    states = np.zeros((4, 4), dtype=complex)
    states[:, 0] = [-xi, 0.0, 0.0, alpha]    # ground
    states[:, 1] = [0.0, dlt, eta, 0.0]
    states[:, 2] = [0.0, eta, -dlt, 0.0]
    states[:, 3] = [alpha, 0.0, 0.0, xi]     # top
    return EigenSystem(energies, states, alpha, xi, eta, dlt)


def transition_frequencies(es: EigenSystem) -> tuple[float, float]:
    """The two doubly degenerate positive gaps the bath couples to.

    eps1 is shared by the 0->1 and 2->3 transitions, eps2 by 0->2 and
    1->3; the 0->3 and 1->2 gaps carry no coupling and never enter.
    """
    e = es.energies
    eps1 = float(e[3] - e[2])
    eps2 = float(e[3] - e[1])
    return eps1, eps2


def bose_einstein_occupation(eps: float, beta: float) -> float:
    """n(eps) = 1/(exp(beta*eps) - 1), stable for large beta*eps."""
    if eps <= 0:
        raise ValueError(f"transition frequency must be positive, got {eps}")
    q = math.exp(-beta * eps)
    return q / (1.0 - q)


def decay_rates(eps: float, params: ReservoirParams) -> tuple[float, float]:
    """(rate_down, rate_up) for a transition of frequency eps.

    With the flat spectral density kappa/pi these are
    rate_down = (kappa/2)(1 + n) and rate_up = (kappa/2) n, which obey
    detailed balance rate_up/rate_down = exp(-beta_c * eps).
    """
    n = bose_einstein_occupation(eps, params.beta_c)
    return 0.5 * params.kappa * (1.0 + n), 0.5 * params.kappa * n


def transition_data(params: ReservoirParams, es: EigenSystem | None = None) -> TransitionData:
    """Bundle the two transition frequencies with their rates."""
    if es is None:
        es = analytic_eigensystem(params)
    eps1, eps2 = transition_frequencies(es)
    d1, u1 = decay_rates(eps1, params)
    d2, u2 = decay_rates(eps2, params)
    n1 = bose_einstein_occupation(eps1, params.beta_c)
    n2 = bose_einstein_occupation(eps2, params.beta_c)
    return TransitionData(eps1, eps2, (d1, d2), (u1, u2), (n1, n2))


def lindblad_channels(es: EigenSystem, td: TransitionData) -> list[tuple[np.ndarray, float]]:
    """The four dissipative channels as (operator, rate) pairs.

    The downward operators are
        L1 = 2 alpha eta (|E0><E1| + |E2><E3|)   at eps1,
        L2 = 2 alpha delta (-|E0><E2| + |E1><E3|) at eps2,
    each spanning both transitions of its degenerate frequency; the
    upward channels are their adjoints with the up rates.
    """
    e0, e1, e2, e3 = (es.states[:, k] for k in range(4))
    l1 = 2.0 * es.alpha * es.eta * (np.outer(e0, e1.conj()) + np.outer(e2, e3.conj()))
    l2 = 2.0 * es.alpha * es.delta * (-np.outer(e0, e2.conj()) + np.outer(e1, e3.conj()))
    return [
        (l1, td.rate_down[0]),
        (l2, td.rate_down[1]),
        (dagger(l1), td.rate_up[0]),
        (dagger(l2), td.rate_up[1]),
    ]


def sector_operators(es: EigenSystem) -> dict[tuple[int, int], np.ndarray]:
    """Frequency-sector decomposition of the bath coupling operators.

    For A_1 = 1 (x) sigma_x and A_2 = 1 (x) sigma_y returns the operators
    A_k(omega) = sum over pairs with E_m - E_n = omega of P_n A_k P_m.
    Keys are (k, s) with s in {+1, +2, -1, -2} standing for the
    frequencies +eps1, +eps2, -eps1, -eps2 (index rather than raw float
    so the resonant J = 0 degeneracy eps1 = eps2 cannot collide).
    Negative frequencies satisfy A_k(-eps) = A_k(eps)^dagger.  The
    0<->3 and 1<->2 sectors vanish identically and are not included.
    """
    couplings = {1: tensor_product(ID2, SIGMA_X), 2: tensor_product(ID2, SIGMA_Y)}
    projectors = [np.outer(es.states[:, k], es.states[:, k].conj()) for k in range(4)]
    out: dict[tuple[int, int], np.ndarray] = {}
    for k, a_k in couplings.items():
        pos1 = projectors[0] @ a_k @ projectors[1] + projectors[2] @ a_k @ projectors[3]
        pos2 = projectors[0] @ a_k @ projectors[2] + projectors[1] @ a_k @ projectors[3]
        out[(k, 1)] = pos1
        out[(k, 2)] = pos2
        out[(k, -1)] = dagger(pos1)
        out[(k, -2)] = dagger(pos2)
    return out


def _superoperator_from_apply(apply, dim: int = 4) -> np.ndarray:
    """Assemble the matrix of a linear map on dim x dim matrices,
    column by column, in row-major vectorization."""
    sup = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            basis = np.zeros((dim, dim), dtype=complex)
            basis[i, j] = 1.0
            sup[:, dim * i + j] = apply(basis).reshape(-1)
    return sup


def _dissipator_apply(channels):
    def apply(rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho, dtype=complex)
        for op, rate in channels:
            opd_op = dagger(op) @ op
            out += rate * (op @ rho @ dagger(op) - 0.5 * (opd_op @ rho + rho @ opd_op))
        return out

    return apply


def dissipator_superoperator(channels) -> np.ndarray:
    """16x16 superoperator of the diagonal-form dissipator."""
    return _superoperator_from_apply(_dissipator_apply(channels))


def sector_dissipator_superoperator(params: ReservoirParams) -> np.ndarray:
    """16x16 dissipator assembled from the frequency-sector double sum.

    Uses the 2x2 rate matrices gamma_kl(omega), which for this bath are
    g(omega) [[1, -i], [i, 1]] at positive omega and
    g(-omega) [[1, i], [-i, 1]] at negative omega.  Rank one in kl, so
    this must agree with the diagonal four-channel form identically.
    """
    es = analytic_eigensystem(params)
    td = transition_data(params, es)
    sectors = sector_operators(es)
    base_pos = np.array([[1.0, -1.0j], [1.0j, 1.0]])
    base_neg = np.array([[1.0, 1.0j], [-1.0j, 1.0]])
    rate_matrices = [
        (1, td.rate_down[0] * base_pos),
        (2, td.rate_down[1] * base_pos),
        (-1, td.rate_up[0] * base_neg),
        (-2, td.rate_up[1] * base_neg),
    ]

    def apply(rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho, dtype=complex)
        for sector, gamma in rate_matrices:
            for k in (1, 2):
                a_k = sectors[(k, sector)]
                for l in (1, 2):
                    a_l = sectors[(l, sector)]
                    akd_al = dagger(a_k) @ a_l
                    out += gamma[k - 1, l - 1] * (
                        a_l @ rho @ dagger(a_k) - 0.5 * (akd_al @ rho + rho @ akd_al)
                    )
        return out

    return _superoperator_from_apply(apply)


@dataclass(frozen=True)
class GKSLGenerator:
    """Right-hand side of the SA master equation.

    hamiltonian : 4x4 coupled Hamiltonian (rad/s)
    channels    : list of (lindblad operator, rate) pairs
    liouvillian : 16x16 superoperator in row-major vectorization
    """

    params: ReservoirParams
    hamiltonian: np.ndarray
    channels: list = field(repr=False)
    liouvillian: np.ndarray = field(repr=False)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Evaluate d rho / dt for a 4x4 matrix rho."""
        return (self.liouvillian @ rho.reshape(-1)).reshape(4, 4)


def build_generator(params: ReservoirParams) -> GKSLGenerator:
    """Assemble Hamiltonian, channels and the 16x16 Liouvillian."""
    hamiltonian = two_qubit_hamiltonian(params)
    es = analytic_eigensystem(params)
    td = transition_data(params, es)
    channels = lindblad_channels(es, td)
    dissipate = _dissipator_apply(channels)

    def apply(rho: np.ndarray) -> np.ndarray:
        return -1j * (hamiltonian @ rho - rho @ hamiltonian) + dissipate(rho)

    liouvillian = _superoperator_from_apply(apply)
    return GKSLGenerator(params, hamiltonian, channels, liouvillian)
