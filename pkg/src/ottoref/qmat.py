"""Dense linear algebra and quantum-information primitives for 2- and 4-level systems.

All operators are plain complex numpy arrays. Energies and inverse
temperatures are carried in natural units (hbar = k_B = 1), so every
energy-like quantity is an angular frequency in rad/s and every inverse
temperature has units of seconds.

Everything here is a pure function; matrices are never mutated in place.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ID2",
    "ID4",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "SupportError",
    "dagger",
    "is_hermitian",
    "assert_density_matrix",
    "tensor_product",
    "partial_trace",
    "trace_distance",
    "von_neumann_entropy",
    "relative_entropy",
    "gibbs_state",
    "hermitian_eig",
    "propagator",
]

ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(4, dtype=complex)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# |0> = (1,0) is the excited state of H = (omega/2) sigma_z for omega > 0.
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |0><1|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|

# Density-matrix eigenvalues in [-EIG_CLAMP, 0) are treated as integrator
# round-off and clamped to zero before logarithms; anything more negative
# is a hard error.
EIG_CLAMP = 1e-9


class SupportError(ValueError):
    """Relative entropy diverges: first argument leaks outside the
    support of the second."""


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def is_hermitian(a: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.allclose(a, a.conj().T, atol=atol, rtol=0.0))


def assert_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> None:
    """Raise ValueError unless rho is Hermitian, unit trace and PSD
    (minimum eigenvalue >= -1e-9)."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not is_hermitian(rho, atol=atol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace {tr} differs from 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -EIG_CLAMP:
        raise ValueError(f"density matrix has eigenvalue {lo} < -{EIG_CLAMP}")


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product a (x) b."""
    return np.kron(a, b)


def partial_trace(rho: np.ndarray, keep: str) -> np.ndarray:
    """Reduce a two-qubit state to one qubit.

    Parameters
    ----------
    rho : (4, 4) array
        Joint state in the product basis |00>,|01>,|10>,|11> where the
        first index is the refrigerant S and the second the auxiliary A.
    keep : {"S", "A"}
        Which subsystem survives.
    """
    if rho.shape != (4, 4):
        raise ValueError(f"partial_trace expects a 4x4 matrix, got {rho.shape}")
    r = rho.reshape(2, 2, 2, 2)
    if keep == "S":
        return np.einsum("ikjk->ij", r)
    if keep == "A":
        return np.einsum("kikj->ij", r)
    raise ValueError(f"keep must be 'S' or 'A', got {keep!r}")


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """D(rho, sigma) = (1/2) Tr |rho - sigma|.

    For Hermitian arguments this is half the sum of the absolute
    eigenvalues of the difference.
    """
    if rho.shape != sigma.shape:
        raise ValueError("trace_distance arguments must have equal shape")
    w = np.linalg.eigvalsh(rho - sigma)
    return float(0.5 * np.abs(w).sum())


def _clamped_spectrum(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a density matrix with round-off clamping."""
    w, v = np.linalg.eigh(rho)
    if w.min() < -EIG_CLAMP:
        raise ValueError(f"density matrix has eigenvalue {w.min()} < -{EIG_CLAMP}")
    return np.clip(w, 0.0, None), v


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S(rho) = -Tr[rho ln rho] in nats, with 0 ln 0 = 0."""
    w, _ = _clamped_spectrum(rho)
    w = w[w > 0.0]
    return float(-(w * np.log(w)).sum())


def relative_entropy(rho: np.ndarray, sigma: np.ndarray, support_tol: float = 1e-12) -> float:
    """Quantum relative entropy D(rho||sigma) = Tr[rho (ln rho - ln sigma)].

    Raises SupportError when rho has weight outside the support of sigma,
    where the quantity diverges.
    """
    if rho.shape != sigma.shape:
        raise ValueError("relative_entropy arguments must have equal shape")
    p, u = _clamped_spectrum(rho)
    q, v = _clamped_spectrum(sigma)
    # overlap[i, j] = |<u_i|v_j>|^2
    overlap = np.abs(dagger(u) @ v) ** 2
    sigma_null = q <= support_tol
    if sigma_null.any():
        leak = p @ overlap[:, sigma_null].sum(axis=1)
        if leak > support_tol:
            raise SupportError(
                f"support violation: weight {leak:.3e} of rho lies in the null space of sigma"
            )
    term_rho = float((p[p > 0.0] * np.log(p[p > 0.0])).sum())
    pos = ~sigma_null
    term_cross = float((p[:, None] * overlap[:, pos] * np.log(q[pos])[None, :]).sum())
    return term_rho - term_cross


def gibbs_state(hamiltonian: np.ndarray, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H)/Z, computed spectrally.

    beta = 0 is accepted and returns the maximally mixed state.
    """
    if not is_hermitian(hamiltonian):
        raise ValueError("gibbs_state requires a Hermitian Hamiltonian")
    if beta < 0 or not np.isfinite(beta):
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    w, v = np.linalg.eigh(hamiltonian)
    weights = np.exp(-beta * (w - w.min()))   # shift avoids overflow
    weights /= weights.sum()
    return (v * weights) @ dagger(v)


def hermitian_eig(hamiltonian: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""
    if not is_hermitian(hamiltonian):
        raise ValueError("hermitian_eig requires a Hermitian matrix")
    return np.linalg.eigh(hamiltonian)


def propagator(hamiltonian: np.ndarray, t: float) -> np.ndarray:
    """Unitary time-evolution operator exp(-i H t), computed spectrally."""
    w, v = hermitian_eig(hamiltonian)
    return (v * np.exp(-1j * w * t)) @ dagger(v)
