"""Time evolution: fixed-step GKSL propagation, closed-form ramp unitaries
and the idealized hot-bath reset.

The dissipative stroke is integrated by exact exponentiation of the 16x16
Liouvillian over a fixed step h; the map exp(h L) is computed once and
reapplied, so the scheme is unconditionally stable and exactly divisible
by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .qmat import gibbs_state
from .reservoir import GKSLGenerator

__all__ = [
    "MAX_STEP",
    "POSITIVITY_FLOOR",
    "RampSpec",
    "Trajectory",
    "PositivityError",
    "ramp_propagator",
    "thermal_reset",
    "propagate_gksl",
]

# Step-size ceiling for the fixed-step propagator (s).
MAX_STEP = 1e-4
# Minimum eigenvalues below this abort propagation.
POSITIVITY_FLOOR = -1e-7


class PositivityError(RuntimeError):
    """Propagated state developed an eigenvalue below the allowed floor."""


@dataclass(frozen=True)
class RampSpec:
    """Linear frequency ramp omega_start -> omega_end over `duration` seconds."""

    omega_start: float
    omega_end: float
    duration: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("ramp duration must be positive")
        if self.omega_start <= 0 or self.omega_end <= 0:
            raise ValueError("ramp frequencies must be positive")

    @property
    def phase(self) -> float:
        """Integral of omega(t) over the ramp: duration * (start + end) / 2."""
        return self.duration * 0.5 * (self.omega_start + self.omega_end)


@dataclass(frozen=True)
class Trajectory:
    """Sampled states of a propagation; times[k] pairs with states[k]."""

    times: np.ndarray
    states: list

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def ramp_propagator(ramp: RampSpec) -> np.ndarray:
    """Unitary for the linearly ramped (omega(t)/2) sigma_z drive.

    The drive commutes with itself at different times, so the
    time-ordered exponential collapses to exp(-i sigma_z Phi / 2) with
    Phi the integrated frequency.  Diagonal, hence populations of any
    diagonal state are untouched.
    """
    half_phase = 0.5 * ramp.phase
    return np.diag([np.exp(-1j * half_phase), np.exp(1j * half_phase)])


def thermal_reset(hamiltonian: np.ndarray, beta: float) -> np.ndarray:
    """Complete thermalization with a bath at inverse temperature beta.

    The hot stroke is assumed long compared to the hot relaxation time,
    so the reset is an exact Gibbs state rather than a finite-time decay.
    """
    return gibbs_state(hamiltonian, beta)


def _check_sample(rho: np.ndarray, t: float) -> None:
    drift = abs(np.trace(rho).real - 1.0)
    if drift > 1e-8:
        raise PositivityError(f"trace drifted by {drift:.3e} at t = {t:.6g} s")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < POSITIVITY_FLOOR:
        raise PositivityError(
            f"minimum eigenvalue {lo:.3e} below {POSITIVITY_FLOOR} at t = {t:.6g} s"
        )


def propagate_gksl(
    rho0: np.ndarray,
    gen: GKSLGenerator,
    duration: float,
    sample_step: float,
    validate: bool = True,
) -> Trajectory:
    """Evolve a 4x4 state under the generator, sampling every sample_step.

    Steps are h = sample_step / ceil(sample_step / MAX_STEP), so samples
    land exactly on multiples of sample_step; a single partial step
    closes the gap when duration is not a multiple, and the final state
    is returned at exactly `duration`.  Each sample is checked for trace
    drift and positivity unless validate is False (the generator is
    linear, so propagating differences of states is legitimate).
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if sample_step <= 0:
        raise ValueError("sample_step must be positive")
    if rho0.shape != (4, 4):
        raise ValueError(f"expected a 4x4 state, got {rho0.shape}")

    times = [0.0]
    states = [rho0.copy()]
    if duration == 0.0:
        return Trajectory(np.array(times), states)

    n_sub = max(1, int(np.ceil(sample_step / MAX_STEP)))
    h = sample_step / n_sub
    step = expm(h * gen.liouvillian)
    vec = rho0.reshape(-1).astype(complex)

    n_samples = int(np.floor(duration / sample_step + 1e-12))
    for k in range(1, n_samples + 1):
        for _ in range(n_sub):
            vec = step @ vec
        t = k * sample_step
        rho = vec.reshape(4, 4)
        if validate:
            _check_sample(rho, t)
        times.append(t)
        states.append(rho.copy())

    remainder = duration - n_samples * sample_step
    if remainder > 1e-12 * max(duration, sample_step):
        vec = expm(remainder * gen.liouvillian) @ vec
        rho = vec.reshape(4, 4)
        if validate:
            _check_sample(rho, duration)
        times.append(duration)
        states.append(rho.copy())
    else:
        times[-1] = duration

    return Trajectory(np.array(times), states)
