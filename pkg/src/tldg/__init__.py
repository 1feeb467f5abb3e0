"""Exact solvers for two-level discounted stochastic games."""

from tldg.errors import (
    GameError,
    InternalInconsistency,
    ParseError,
    TooLarge,
    ValidationError,
    Violation,
)
from tldg.evaluation import (
    ValueIterationResult,
    bellman_apply,
    policy_evaluate,
    value_iteration,
)
from tldg.game import (
    Level,
    Owner,
    PureStrategyProfile,
    RawGame,
    RawState,
    TwoLevelGame,
    almost_sure_reach_set,
    validate_structure,
    validate_two_level,
)
from tldg.io import parse_game, parse_strategy, serialize_game, serialize_strategy
from tldg.reductions import HitDistribution, freeze_lower, hit_distribution
from tldg.semantics import SimulationReport, path_payoff, simulate_value
from tldg.solvers import (
    SaddleCertificate,
    SolveResult,
    best_response_p1,
    best_response_p2,
    certify_saddle,
    decide,
    mdp_lp_solve,
    solve_enumerate,
    solve_strategy_improvement,
)
from tldg.estimator import TwoLevelGameSolver

__all__ = [
    "GameError",
    "HitDistribution",
    "InternalInconsistency",
    "Level",
    "Owner",
    "ParseError",
    "PureStrategyProfile",
    "RawGame",
    "RawState",
    "SaddleCertificate",
    "SimulationReport",
    "SolveResult",
    "TooLarge",
    "TwoLevelGame",
    "TwoLevelGameSolver",
    "ValidationError",
    "ValueIterationResult",
    "Violation",
    "almost_sure_reach_set",
    "bellman_apply",
    "best_response_p1",
    "best_response_p2",
    "certify_saddle",
    "decide",
    "freeze_lower",
    "hit_distribution",
    "mdp_lp_solve",
    "parse_game",
    "parse_strategy",
    "path_payoff",
    "policy_evaluate",
    "serialize_game",
    "serialize_strategy",
    "simulate_value",
    "solve_enumerate",
    "solve_strategy_improvement",
    "validate_structure",
    "validate_two_level",
    "value_iteration",
]
