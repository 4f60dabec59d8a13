"""Equilibrium signal aggregation in sequential Gaussian social learning."""

__version__ = "0.1.0"

from .closedform import (
    cancellation_efficiency,
    maximal_efficiency,
    moment_recursion,
    planner_counts,
    planner_profile,
    silo_rates,
    stationary_distribution,
    symmetric_efficiency,
)
from .equilibrium import (
    SignalCounts,
    StrategyProfile,
    WeightMatrix,
    equilibrium,
    equilibrium_profile,
    equilibrium_weights,
    mentorship_weights,
    signal_counts,
)
from .montecarlo import SimConfig, empirical_signal_count, random_ensemble, simulate_paths
from .netcore import (
    GenerationsSpec,
    Network,
    build_generations,
    build_maximal,
    build_mentorship,
    build_silo,
    chain,
    complete_prefix,
    sample_fixed_degree,
)
from .welfare import accuracy_prob, attainment, expected_utility, patient_compare
