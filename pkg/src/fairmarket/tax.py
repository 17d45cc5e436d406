"""Bracketed fairness tax: bracket lookup, baseline schedule, welfare, penalty.

The [0, 1] fairness range is split into B equal brackets.  A firm whose local
fairness score lands in bracket b pays tax rate ``rates[b - 1]`` on its
profit.  The hand-crafted baseline is the decreasing linear schedule
``1 - b / B``: the fairer the firm, the less tax it pays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .fairness import FairnessReport


@dataclass(frozen=True)
class TaxSchedule:
    """Per-bracket tax rates over B equal-width fairness brackets."""

    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if len(self.rates) < 1:
            raise ConfigurationError("a tax schedule needs at least one bracket")
        for b, rate in enumerate(self.rates, start=1):
            if not 0.0 <= rate <= 1.0:
                raise ConfigurationError(
                    f"bracket {b}: tax rate must lie in [0, 1], got {rate}"
                )

    @property
    def brackets(self) -> int:
        return len(self.rates)


def bracket_index(f: float, brackets: int) -> int:
    """1-based bracket of a fairness value: b such that f in [(b-1)/B, b/B).

    f = 1.0 belongs to no half-open interval and is clamped to bracket B.
    """
    if brackets < 1:
        raise DomainError(f"bracket count must be >= 1, got {brackets}")
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"fairness value must lie in [0, 1], got {f}")
    return min(int(f * brackets), brackets - 1) + 1


def linear_baseline(brackets: int) -> TaxSchedule:
    """The monotone linear schedule rates[b] = 1 - b/B, b = 1..B."""
    if brackets < 1:
        raise DomainError(f"bracket count must be >= 1, got {brackets}")
    return TaxSchedule(tuple(1.0 - b / brackets for b in range(1, brackets + 1)))


def rate_for_fairness(schedule: TaxSchedule, f: float) -> float:
    """Tax rate the schedule assigns to local fairness score ``f``."""
    return schedule.rates[bracket_index(f, schedule.brackets) - 1]


def net_profit(pre_tax: float, f: float, schedule: TaxSchedule) -> float:
    """After-tax profit of a firm with fairness score ``f``.

    Losses pass through the (1 - tax) factor unchanged.
    """
    return pre_tax * (1.0 - rate_for_fairness(schedule, f))


def welfare(net_profits: Sequence[float], global_score: float) -> float:
    """Mean after-tax profit scaled by the global fairness score."""
    net_profits = np.asarray(net_profits, dtype=float)
    if net_profits.size < 1:
        raise ConfigurationError("welfare needs at least one firm profit")
    if not 0.0 <= global_score <= 1.0:
        raise DomainError(f"global fairness score must lie in [0, 1], got {global_score}")
    return float(net_profits.mean() * global_score)


@dataclass(frozen=True)
class PlannerConfig:
    """Planner objective parameters: penalty weight, baseline, and goal."""

    lam: float
    baseline: TaxSchedule
    objective_kind: str = "welfare-max"
    tau_min: float = 0.0
    tau_max: float = 1.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ConfigurationError(f"lambda must be nonnegative, got {self.lam}")
        if self.objective_kind not in ("welfare-max", "fairness-max"):
            raise ConfigurationError(
                f"objective_kind must be 'welfare-max' or 'fairness-max', "
                f"got {self.objective_kind!r}"
            )
        if not 0.0 <= self.tau_min < self.tau_max <= 1.0:
            raise ConfigurationError(
                f"need 0 <= tau_min < tau_max <= 1, got [{self.tau_min}, {self.tau_max}]"
            )


def l1_penalty(tau: TaxSchedule, config: PlannerConfig) -> float:
    """lambda times the total absolute deviation from the baseline schedule."""
    if tau.brackets != config.baseline.brackets:
        raise ConfigurationError(
            f"schedule has {tau.brackets} brackets but baseline has "
            f"{config.baseline.brackets}"
        )
    deviation = np.abs(np.array(tau.rates) - np.array(config.baseline.rates)).sum()
    return float(config.lam * deviation)


def planner_objective(welfare_value: float, penalty: float) -> float:
    """Penalized objective the planner maximizes."""
    return welfare_value - penalty


@dataclass(frozen=True)
class MarketOutcome:
    """Everything observable after one market resolution under a schedule."""

    prices: np.ndarray
    choices: np.ndarray
    pre_tax_profits: np.ndarray
    net_profits: np.ndarray
    fairness: FairnessReport
    opt_out: np.ndarray
    welfare: float
    converged: bool = True
    rounds_used: int = 0
