"""Exact-probability engine, simulator, and advisor for the einz game."""

from .cards import Hand, HandClass, PER_DECK, POINT_VALUES, Shoe, classify, fresh_shoe
from .exact import (
    Outcome,
    OutcomeDistribution,
    OutcomeKind,
    ShoeTooSmallError,
    conditional_score_given_stand,
    expected_score,
    outcome_distribution,
    reach_probability,
)
from .matchup import (
    DealerRules,
    DealerVariant,
    MatchResult,
    PlayerSummary,
    dealer_match,
    open_match,
    policy_summary,
    standing_match,
)
from .montecarlo import SimConfig, SimReport, simulate
from .policy import Action, ThresholdPolicy, decide, parse_policy
from .scenario import (
    ActionEvaluation,
    GameMode,
    InconsistentStateError,
    ObservedState,
    OpponentInfo,
    RuleSet,
    StateParseError,
    change_on_14_comparison,
    evaluate_actions,
    parse_observed_state,
    recommend,
    standing_showdown,
)
from .tables import TableData, build_table, dealer_summary_grid

__version__ = "1.0.0"

__all__ = [
    "Action",
    "ActionEvaluation",
    "DealerRules",
    "DealerVariant",
    "GameMode",
    "Hand",
    "HandClass",
    "InconsistentStateError",
    "MatchResult",
    "ObservedState",
    "OpponentInfo",
    "Outcome",
    "OutcomeDistribution",
    "OutcomeKind",
    "PER_DECK",
    "POINT_VALUES",
    "PlayerSummary",
    "RuleSet",
    "Shoe",
    "ShoeTooSmallError",
    "SimConfig",
    "SimReport",
    "StateParseError",
    "TableData",
    "ThresholdPolicy",
    "build_table",
    "change_on_14_comparison",
    "classify",
    "conditional_score_given_stand",
    "dealer_match",
    "dealer_summary_grid",
    "decide",
    "evaluate_actions",
    "expected_score",
    "fresh_shoe",
    "open_match",
    "outcome_distribution",
    "parse_observed_state",
    "parse_policy",
    "policy_summary",
    "reach_probability",
    "recommend",
    "simulate",
    "standing_match",
    "standing_showdown",
]
