"""Seek-time analysis of ergodic finite-state Markov chains.

Computes the equilibrium distribution, the expected-excess-visits
(fundamental) matrix, mean hitting times, the Kemeny constant by three
independent routes, per-state renewal statistics and visit-count
variance rates, and cross-checks all of it against a seeded Monte Carlo
simulator.
"""

from .chain import (
    ChainStructure,
    StochasticMatrix,
    classify_structure,
    load_matrix,
    parse_matrix,
    validate_stochastic,
)
from .equilibrium import (
    CesaroLimit,
    averaging_residuals,
    cesaro_limit,
    stationary_distribution,
    stationary_distribution_direct,
)
from .errors import (
    ConditioningError,
    ConsistencyError,
    InputError,
    MultiplicityError,
    NonnegativityError,
    ParseError,
    SeektimeError,
    ShapeError,
    SimulationTimeout,
    StochasticityError,
    StructureError,
    UnknownStateError,
)
from .mc import (
    EmpiricalEstimate,
    SimulationConfig,
    estimate_hitting_time,
    estimate_kemeny,
    estimate_return_moments,
    occupancy_zscores,
    simulate_visits,
)
from .renewal import (
    InterarrivalDistribution,
    RenewalCountApprox,
    RenewalStats,
    clt_gaussian_params,
    equilibrium_wait,
    excess_visits_from_moments,
    expected_renewal_count,
    interarrival_stats,
    renewal_stats,
    renewal_table,
)
from .resolvent import (
    SeekTimeReport,
    fundamental_matrix,
    kemeny_trace,
    mean_hitting_times,
    mean_time_from_equilibrium,
    mean_time_to_equilibrium,
)
from .spectral import (
    BoundReport,
    SpectralSummary,
    check_lower_bound,
    eigenvalues,
    kemeny_spectral,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CesaroLimit",
    "ChainStructure",
    "ConditioningError",
    "ConsistencyError",
    "EmpiricalEstimate",
    "InputError",
    "InterarrivalDistribution",
    "MultiplicityError",
    "NonnegativityError",
    "ParseError",
    "RenewalCountApprox",
    "RenewalStats",
    "SeekTimeReport",
    "SeektimeError",
    "ShapeError",
    "SimulationConfig",
    "SimulationTimeout",
    "SpectralSummary",
    "StochasticMatrix",
    "StochasticityError",
    "StructureError",
    "UnknownStateError",
    "averaging_residuals",
    "cesaro_limit",
    "check_lower_bound",
    "classify_structure",
    "clt_gaussian_params",
    "eigenvalues",
    "equilibrium_wait",
    "estimate_hitting_time",
    "estimate_kemeny",
    "estimate_return_moments",
    "excess_visits_from_moments",
    "expected_renewal_count",
    "fundamental_matrix",
    "interarrival_stats",
    "kemeny_spectral",
    "kemeny_trace",
    "load_matrix",
    "mean_hitting_times",
    "mean_time_from_equilibrium",
    "mean_time_to_equilibrium",
    "occupancy_zscores",
    "parse_matrix",
    "renewal_stats",
    "renewal_table",
    "simulate_visits",
    "stationary_distribution",
    "stationary_distribution_direct",
    "validate_stochastic",
]
