"""Forced-move random tug-of-war games on graphs.

Two players move a token on a finite graph.  At each turn Player I either
plays a fair-coin round (the winner moves the token to a neighbor of their
choice) or forces Player II to move in exchange for a fixed payment eps.
Play ends at a terminal node, where Player II pays Player I the node's
payoff plus eps per forced move.  The package computes the game value by
fixed-point iteration, verifies it with comparison-principle machinery,
cross-checks closed forms, simulates play, and solves the matching
eps-ball game on 1D/2D lattices.
"""

from .closed_form import (
    SegmentSolution,
    q_parameter,
    segment_strategies,
    segment_value,
    star_value,
)
from .comparison import Classification, StrictifyResult, classify, comparison_test, strictify
from .continuum import (
    GridProblem,
    GridSolveReport,
    GridValues,
    analytic_1d,
    ball_dpp_apply,
    convergence_study,
    grid_solve,
    jensen_residual,
    neighborhood,
)
from .errors import (
    DegenerateInputError,
    EstimateUndefinedError,
    PreconditionError,
    StarReductionError,
    ValidationError,
)
from .graphs import (
    GameGraph,
    GameSpec,
    build_segment,
    build_star,
    spec_from_json,
    spec_to_json,
    validate,
)
from .play import (
    LET,
    UNUSED,
    Divergent,
    EpisodeOutcome,
    Estimate,
    StrategyPair,
    brute_force_value,
    estimate,
    exact_expected,
    run_episode,
    stationary_values,
)
from .solver import (
    SolveReport,
    barrier_bounds,
    dpp_apply,
    largest_subsolution_below,
    residual,
    residual_vector,
    smallest_supersolution_above,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "GameGraph",
    "GameSpec",
    "build_segment",
    "build_star",
    "validate",
    "spec_to_json",
    "spec_from_json",
    "SolveReport",
    "dpp_apply",
    "residual",
    "residual_vector",
    "barrier_bounds",
    "solve",
    "largest_subsolution_below",
    "smallest_supersolution_above",
    "Classification",
    "StrictifyResult",
    "classify",
    "strictify",
    "comparison_test",
    "SegmentSolution",
    "q_parameter",
    "segment_value",
    "segment_strategies",
    "star_value",
    "LET",
    "UNUSED",
    "StrategyPair",
    "EpisodeOutcome",
    "Estimate",
    "Divergent",
    "run_episode",
    "estimate",
    "exact_expected",
    "brute_force_value",
    "stationary_values",
    "GridProblem",
    "GridValues",
    "GridSolveReport",
    "neighborhood",
    "ball_dpp_apply",
    "grid_solve",
    "jensen_residual",
    "analytic_1d",
    "convergence_study",
    "ValidationError",
    "PreconditionError",
    "DegenerateInputError",
    "StarReductionError",
    "EstimateUndefinedError",
]
