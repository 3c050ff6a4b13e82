"""Finite-time quantum Otto refrigerator with an engineered cold reservoir.

The cold bath seen by the single-qubit refrigerant is an auxiliary qubit
damped by a flat Markovian reservoir; tuning the qubit-qubit coupling
against the damping rate switches the reduced refrigerant dynamics
between Markovian and non-Markovian regimes.  The package simulates the
four-stroke cycle, tracks the interaction-energy correction to the
figures of merit, and provides trace-distance non-Markovianity
diagnostics plus a sweep CLI.
"""

__version__ = "0.1.0"

from . import cli, cycle, dynamics, qmat, reservoir, witness
from .cycle import (
    CycleConfig,
    Metrics,
    StrokeLedger,
    cop_identity_checks,
    figures_of_merit,
    mutual_information_at_tau2,
    run_cycle,
    run_to_limit_cycle,
)
from .dynamics import RampSpec, Trajectory, propagate_gksl, ramp_propagator, thermal_reset
from .reservoir import (
    EigenSystem,
    GKSLGenerator,
    ReservoirParams,
    analytic_eigensystem,
    build_generator,
    decay_rates,
    lindblad_channels,
    sector_operators,
    transition_frequencies,
    two_qubit_hamiltonian,
)
from .witness import WitnessConfig, WitnessReport, blp_accumulator, pair_scan, trace_distance_trajectory

__all__ = [
    "__version__",
    "qmat",
    "reservoir",
    "dynamics",
    "cycle",
    "witness",
    "cli",
    "CycleConfig",
    "Metrics",
    "StrokeLedger",
    "run_cycle",
    "figures_of_merit",
    "cop_identity_checks",
    "mutual_information_at_tau2",
    "run_to_limit_cycle",
    "RampSpec",
    "Trajectory",
    "propagate_gksl",
    "ramp_propagator",
    "thermal_reset",
    "ReservoirParams",
    "EigenSystem",
    "GKSLGenerator",
    "two_qubit_hamiltonian",
    "analytic_eigensystem",
    "transition_frequencies",
    "decay_rates",
    "lindblad_channels",
    "sector_operators",
    "build_generator",
    "WitnessConfig",
    "WitnessReport",
    "trace_distance_trajectory",
    "pair_scan",
    "blp_accumulator",
]
