"""Oligopoly dynamic-pricing simulator with a bracketed fairness-tax planner."""

from .equilibrium import (
    LIGHT_SETTINGS,
    EquilibriumResult,
    SolverSettings,
    collusive_optimum,
    compute_outcome,
    direction_set_minimize,
    firm_best_response,
    nash_equilibrium,
)
from .errors import ConfigurationError, DomainError, NumericError
from .fairness import (
    FairnessReport,
    bernstein_tail_bound,
    fairness_report,
    global_fairness_gap,
    hoeffding_gap_bound,
    local_fairness_gap,
    prop1_bound,
)
from .market import (
    ConsumerProfile,
    FirmSpec,
    MarketConfig,
    choice_probabilities,
    consumer_surplus,
    expected_demand,
    opt_out_rates,
    utility,
)
from .planner import (
    PlannerResult,
    SearchSettings,
    evaluate_schedule,
    fairness_upper_bound,
    search_schedule,
)
from .scenarios import (
    BenchmarkRow,
    ComparisonReport,
    RegimeSpec,
    compare_regimes,
    load_bundled,
    load_market_config,
    run_regime,
    runtime_benchmark,
)
from .tax import (
    MarketOutcome,
    PlannerConfig,
    TaxSchedule,
    bracket_index,
    l1_penalty,
    linear_baseline,
    net_profit,
    planner_objective,
    welfare,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkRow",
    "ComparisonReport",
    "ConfigurationError",
    "ConsumerProfile",
    "DomainError",
    "EquilibriumResult",
    "FairnessReport",
    "FirmSpec",
    "LIGHT_SETTINGS",
    "MarketConfig",
    "MarketOutcome",
    "NumericError",
    "PlannerConfig",
    "PlannerResult",
    "RegimeSpec",
    "SearchSettings",
    "SolverSettings",
    "TaxSchedule",
    "bernstein_tail_bound",
    "bracket_index",
    "choice_probabilities",
    "collusive_optimum",
    "compare_regimes",
    "compute_outcome",
    "consumer_surplus",
    "direction_set_minimize",
    "evaluate_schedule",
    "expected_demand",
    "fairness_report",
    "fairness_upper_bound",
    "firm_best_response",
    "global_fairness_gap",
    "hoeffding_gap_bound",
    "l1_penalty",
    "linear_baseline",
    "load_bundled",
    "load_market_config",
    "local_fairness_gap",
    "nash_equilibrium",
    "net_profit",
    "opt_out_rates",
    "planner_objective",
    "prop1_bound",
    "run_regime",
    "runtime_benchmark",
    "search_schedule",
    "utility",
    "welfare",
]
