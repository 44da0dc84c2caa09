"""Monte Carlo laboratory for one-dimensional gradient dynamics driven by
small heavy-tailed Levy noise."""

from ._core import (
    Decomposition,
    ExitSample,
    GeneratorMatrix,
    Landscape,
    LevyModel,
    LevylabError,
    PathSimulator,
    PolynomialPotential,
    RngStream,
    SimConfig,
    SimMode,
    analyze,
    basin_of,
    big_jump_rate,
    chain_transition_matrix,
    compute_generator,
    exit_rate,
    exit_split_test,
    flow,
    gaussian_comparison,
    ks_exponential,
    relaxation_time,
    run_experiment,
    simulate_chain,
    stable_increment,
    time_scale,
    validate_config,
)

__all__ = [
    "Decomposition",
    "ExitSample",
    "GeneratorMatrix",
    "Landscape",
    "LevyModel",
    "LevylabError",
    "PathSimulator",
    "PolynomialPotential",
    "RngStream",
    "SimConfig",
    "SimMode",
    "analyze",
    "basin_of",
    "big_jump_rate",
    "chain_transition_matrix",
    "compute_generator",
    "exit_rate",
    "exit_split_test",
    "flow",
    "gaussian_comparison",
    "ks_exponential",
    "relaxation_time",
    "run_experiment",
    "simulate_chain",
    "stable_increment",
    "time_scale",
    "validate_config",
]
