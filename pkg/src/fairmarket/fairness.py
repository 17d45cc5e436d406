"""Fairness gaps and scores, plus closed-form bounds linking them.

A firm's *local* gap is the largest pairwise difference, across consumer
profiles, of the probability that the firm is chosen.  The market's *global*
gap is the same quantity for the opt-out probability.  Scores are defined as
one minus the corresponding gap, so both live in [0, 1] with 1 meaning
perfectly profile-independent behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .market import validate_choices


@dataclass(frozen=True)
class FairnessReport:
    """Local gaps/scores per firm and the market-wide global gap/score."""

    local_gaps: tuple[float, ...]
    local_scores: tuple[float, ...]
    global_gap: float
    global_score: float


def _column_gap(column: np.ndarray) -> float:
    # max pairwise |difference| over a vector equals max - min; a single
    # profile has no pairs, hence gap 0
    if column.size <= 1:
        return 0.0
    return float(column.max() - column.min())


def local_fairness_gap(choices: np.ndarray, firm: int) -> float:
    """Largest cross-profile difference in firm ``firm``'s choice probability.

    ``firm`` indexes choice-matrix columns, so valid values are 1..n;
    column 0 is the outside option and belongs to :func:`global_fairness_gap`.
    """
    choices = validate_choices(choices)
    if firm == 0:
        raise DomainError("column 0 is the outside option; use global_fairness_gap")
    if not 1 <= firm < choices.shape[1]:
        raise DomainError(f"firm column {firm} out of range [1, {choices.shape[1] - 1}]")
    return _column_gap(choices[:, firm])


def global_fairness_gap(choices: np.ndarray) -> float:
    """Largest cross-profile difference in the opt-out probability."""
    choices = validate_choices(choices)
    return _column_gap(choices[:, 0])


def fairness_report(choices: np.ndarray) -> FairnessReport:
    """Bundle local and global gaps/scores for one choice matrix."""
    choices = validate_choices(choices)
    n = choices.shape[1] - 1
    local_gaps = tuple(local_fairness_gap(choices, j) for j in range(1, n + 1))
    global_gap = global_fairness_gap(choices)
    return FairnessReport(
        local_gaps=local_gaps,
        local_scores=tuple(1.0 - g for g in local_gaps),
        global_gap=global_gap,
        global_score=1.0 - global_gap,
    )


def prop1_bound(n_firms: int, epsilon: float) -> float:
    """Global-gap bound implied by an epsilon bound on every firm's local gap.

    If all n firms have local gap at most epsilon, the opt-out disparity is at
    most min(n * epsilon, 1).
    """
    if n_firms < 1:
        raise DomainError(f"n_firms must be >= 1, got {n_firms}")
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    return min(n_firms * epsilon, 1.0)


def hoeffding_gap_bound(n_firms: int, epsilon: float, delta: float) -> float:
    """High-probability opt-out-gap bound from bounded per-firm differences.

    Treating the N per-firm probability differences as independent variables
    bounded in [-epsilon, epsilon], the opt-out gap is at most
    ``2 * epsilon * sqrt((N / 2) * log(2 / delta))`` with probability 1 - delta.
    """
    if n_firms < 0:
        raise DomainError(f"n_firms must be >= 0, got {n_firms}")
    if epsilon < 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    if not 0.0 < delta <= 2.0:
        raise DomainError(f"delta must lie in (0, 2], got {delta}")
    return 2.0 * epsilon * math.sqrt((n_firms / 2.0) * math.log(2.0 / delta))


def bernstein_tail_bound(n_firms: int, epsilon: float, sigma_sq: float, t: float) -> float:
    """Variance-aware tail probability for the sum of per-firm differences.

    Returns ``2 * exp(-t^2 / (2 N sigma^2 + (2/3) epsilon t))`` clamped to
    [0, 1].  Tighter than the Hoeffding form when sigma^2 << epsilon^2.
    """
    if n_firms < 0 or epsilon < 0 or sigma_sq < 0 or t < 0:
        raise DomainError("all Bernstein bound inputs must be nonnegative")
    denominator = 2.0 * n_firms * sigma_sq + (2.0 / 3.0) * epsilon * t
    if denominator <= 0:
        raise DomainError("Bernstein denominator is zero; need N*sigma^2 > 0 or epsilon*t > 0")
    return min(1.0, 2.0 * math.exp(-(t * t) / denominator))
