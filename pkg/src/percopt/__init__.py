"""Outbreak analytics and incentive-allocation optimization on random networks."""

from ._core import backend
from .degree_dist import DegreeDistribution
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateDistributionError,
    InfeasibleError,
    ParameterError,
    PercoptError,
    SupercriticalError,
)
from .lp import LpSolution, lp_solve
from .optimizer import (
    CostModel,
    OptimizationResult,
    OptimizationSpec,
    solve_cost_min,
    solve_cost_min_at_q,
    solve_size_max,
)
from .percolation import (
    ComponentStats,
    IncentivePolicy,
    OutbreakAnalysis,
    PercolationParams,
    TwoTypeMixture,
    branching_factor,
    branching_factor_at_q,
    effective_transmissibility,
    excess_mean,
    fixed_point_rhs,
    invert_outreach,
    mean_component_size,
    mean_component_size_at_q,
    mixture,
    outbreak_analysis,
    outbreak_analysis_at_q,
    psi_at_u,
    solve_fixed_point,
    solve_fixed_point_at_q,
    transmissibility,
)
from .simulator import (
    Network,
    SimulationReport,
    TrialOutcome,
    build_network,
    percolation_trial,
    run_campaign,
    sir_trial,
    write_edge_csv,
    write_node_csv,
)

__version__ = "0.1.0"
