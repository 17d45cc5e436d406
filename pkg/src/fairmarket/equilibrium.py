"""Price optimization and Nash best-response iteration.

Firms face piecewise-constant jumps in their after-tax objective whenever a
candidate price vector moves them across a fairness bracket, so all price
optimization goes through a derivative-free direction-set (Powell) search.

A crucial modelling point: the tax bracket is re-evaluated *inside* each
firm's objective from the candidate prices ("endogenous" bracket).  A tax
rate frozen before the optimization merely scales profit by a constant and
cannot move the argmax, so a frozen-bracket regime is provided only for
comparison.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import Bounds, minimize

from .errors import ConfigurationError, NumericError
from .fairness import fairness_report
from .market import MarketConfig, choice_probabilities, validate_prices
from .tax import MarketOutcome, TaxSchedule, rate_for_fairness, welfare


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for price optimization and best-response iteration."""

    price_tolerance: float = 1e-4
    max_rounds: int = 200
    optimizer_tolerance: float = 1e-6
    max_optimizer_iterations: int = 1000
    restarts: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.price_tolerance <= 0 or self.optimizer_tolerance <= 0:
            raise ConfigurationError("tolerances must be positive")
        if self.max_rounds < 1 or self.max_optimizer_iterations < 1 or self.restarts < 1:
            raise ConfigurationError("iteration counts and restarts must be >= 1")


#: Light settings for inner-loop evaluations (planner search); the final
#: reported equilibria are always re-solved with full settings.
LIGHT_SETTINGS = SolverSettings(
    price_tolerance=1e-3,
    max_rounds=60,
    optimizer_tolerance=1e-3,
    max_optimizer_iterations=30,
    restarts=1,
)


@dataclass(frozen=True)
class EquilibriumResult:
    """Fixed point (or best effort) of the synchronous best-response map."""

    prices: np.ndarray
    rounds_used: int
    converged: bool
    max_last_step: float


def direction_set_minimize(objective, start, bounds, settings: SolverSettings) -> np.ndarray:
    """Minimize a black-box function over a box with Powell's direction-set method.

    Runs from ``start`` plus ``settings.restarts - 1`` uniform random points
    in the box (seeded, hence deterministic) and returns the best point
    found.  The result never has a worse objective than ``start``.
    """
    start = np.atleast_1d(np.asarray(start, dtype=float))
    lower = np.array([b[0] for b in bounds], dtype=float)
    upper = np.array([b[1] for b in bounds], dtype=float)
    if start.shape != lower.shape:
        raise ConfigurationError("start point and bounds have mismatched dimensions")
    if np.any(start < lower - 1e-12) or np.any(start > upper + 1e-12):
        raise ConfigurationError("start point lies outside the bounds")

    def checked(x):
        value = objective(x)
        if not np.isfinite(value):
            raise NumericError(f"objective returned non-finite value at x={x!r}")
        return value

    rng = np.random.default_rng(settings.seed)
    starts = [np.clip(start, lower, upper)]
    for _ in range(settings.restarts - 1):
        starts.append(rng.uniform(lower, upper))

    best_x = starts[0]
    best_f = checked(best_x)
    any_converged = False
    for x0 in starts:
        result = minimize(
            checked,
            x0,
            method="Powell",
            bounds=Bounds(lower, upper),
            options={
                "xtol": settings.optimizer_tolerance,
                "ftol": settings.optimizer_tolerance,
                "maxiter": settings.max_optimizer_iterations,
            },
        )
        any_converged = any_converged or bool(result.success)
        if result.fun < best_f:
            best_f = result.fun
            best_x = np.clip(result.x, lower, upper)
    if not any_converged:
        warnings.warn(
            "direction-set search hit its iteration cap; returning best point found",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.atleast_1d(best_x)


def _derived(settings: SolverSettings, offset: int) -> SolverSettings:
    # decorrelate restart draws across (round, firm) pairs while staying
    # deterministic in the top-level seed
    return replace(settings, seed=settings.seed * 1000003 + offset)


def firm_best_response(
    config: MarketConfig,
    firm: int,
    prices: np.ndarray,
    schedule: TaxSchedule | None = None,
    settings: SolverSettings = SolverSettings(),
    frozen_fairness: float | None = None,
) -> np.ndarray:
    """Profit-maximizing price vector for one firm, others' prices held fixed.

    ``firm`` is a 0-based index into ``config.firms``.  With a schedule, the
    firm's tax bracket is recomputed inside the objective from the candidate
    prices' implied local fairness score, unless ``frozen_fairness`` pins the
    bracket to a pre-set score.
    """
    prices = validate_prices(config, prices)
    if not 0 <= firm < config.n:
        raise ConfigurationError(f"firm index {firm} out of range [0, {config.n})")

    betas = config.betas
    sizes = config.sizes
    alpha_j = config.firms[firm].base_utility
    mc_j = config.marginal_costs[:, firm]
    m = config.m

    # Fixed part of each profile's logit denominator: outside option plus the
    # other firms.  Stabilized by a per-profile shift that also dominates the
    # candidate's own utility over the whole price box.
    fixed_u = np.empty((m, config.n))
    fixed_u[:, 0] = config.outside_utility
    others = [k for k in range(config.n) if k != firm]
    for col, k in enumerate(others, start=1):
        fixed_u[:, col] = config.firms[k].base_utility - betas * prices[:, k]
    shift = np.maximum(fixed_u.max(axis=1), alpha_j - betas * config.price_min)
    rest = np.exp(fixed_u - shift[:, None]).sum(axis=1)

    if schedule is not None and frozen_fairness is not None:
        frozen_factor = 1.0 - rate_for_fairness(schedule, frozen_fairness)
    else:
        frozen_factor = None

    def neg_after_tax_profit(p):
        own = np.exp(alpha_j - betas * p - shift)
        q = own / (rest + own)
        pre_tax = sizes @ (q * (p - mc_j))
        if schedule is None:
            return -pre_tax
        if frozen_factor is not None:
            return -pre_tax * frozen_factor
        gap = q.max() - q.min() if m > 1 else 0.0
        return -pre_tax * (1.0 - rate_for_fairness(schedule, 1.0 - gap))

    bounds = [(config.price_min, config.price_max)] * m
    return direction_set_minimize(neg_after_tax_profit, prices[:, firm], bounds, settings)


def nash_equilibrium(
    config: MarketConfig,
    schedule: TaxSchedule | None = None,
    settings: SolverSettings = SolverSettings(),
    initial_prices: np.ndarray | None = None,
    endogenous_brackets: bool = True,
    stop_on_convergence: bool = True,
) -> EquilibriumResult:
    """Synchronous best-response iteration until prices stop moving.

    Every round, each firm best-responds to the *previous* round's prices;
    all firms then update simultaneously.  Non-convergence within
    ``max_rounds`` is reported, not raised.  With
    ``endogenous_brackets=False`` each firm's tax bracket is frozen at the
    start of the round from the incumbent prices (which provably cannot move
    any argmax; provided for comparison only).
    """
    if initial_prices is None:
        prices = config.midpoint_prices()
    else:
        prices = validate_prices(config, initial_prices).copy()

    rounds_used = 0
    max_step = np.inf
    converged = False
    for round_no in range(1, settings.max_rounds + 1):
        rounds_used = round_no
        frozen: list[float | None] = [None] * config.n
        if schedule is not None and not endogenous_brackets:
            choices = choice_probabilities(config, prices)
            cols = choices[:, 1:]
            frozen = [
                1.0 - (cols[:, j].max() - cols[:, j].min()) for j in range(config.n)
            ]
        new_prices = np.empty_like(prices)
        for j in range(config.n):
            new_prices[:, j] = firm_best_response(
                config,
                j,
                prices,
                schedule=schedule,
                settings=_derived(settings, round_no * 8191 + j),
                frozen_fairness=frozen[j],
            )
        max_step = float(np.abs(new_prices - prices).max())
        prices = new_prices
        if stop_on_convergence and max_step <= settings.price_tolerance:
            converged = True
            break
    return EquilibriumResult(
        prices=prices,
        rounds_used=rounds_used,
        converged=converged,
        max_last_step=max_step,
    )


def collusive_optimum(
    config: MarketConfig, settings: SolverSettings = SolverSettings()
) -> EquilibriumResult:
    """Joint pre-tax profit maximum over all prices (the unregulated cartel).

    Aggregate profit is additive across profiles (profile i's choices depend
    only on row i of the price matrix), so the joint problem decomposes into
    m independent n-dimensional searches.
    """
    prices = np.empty((config.m, config.n))
    mid = config.midpoint_prices()
    bounds = [(config.price_min, config.price_max)] * config.n
    alphas = config.base_utilities
    for i in range(config.m):
        beta_i = config.betas[i]
        size_i = config.sizes[i]
        mc_i = config.marginal_costs[i]
        a0 = config.outside_utility

        def neg_row_profit(p_row):
            u = alphas - beta_i * p_row
            top = max(a0, u.max())
            z = np.exp(u - top)
            denom = np.exp(a0 - top) + z.sum()
            q = z / denom
            return -size_i * (q @ (p_row - mc_i))

        prices[i] = direction_set_minimize(
            neg_row_profit, mid[i], bounds, _derived(settings, 31 + i)
        )
    return EquilibriumResult(prices=prices, rounds_used=1, converged=True, max_last_step=0.0)


def compute_outcome(
    config: MarketConfig,
    prices: np.ndarray,
    schedule: TaxSchedule | None = None,
    converged: bool = True,
    rounds_used: int = 0,
) -> MarketOutcome:
    """Resolve choices, profits, fairness, and welfare at given prices."""
    prices = validate_prices(config, prices)
    choices = choice_probabilities(config, prices)
    report = fairness_report(choices)
    margins = (prices - config.marginal_costs) * choices[:, 1:]
    pre_tax = config.sizes @ margins
    if schedule is None:
        net = pre_tax.copy()
    else:
        factors = np.array(
            [1.0 - rate_for_fairness(schedule, f) for f in report.local_scores]
        )
        net = pre_tax * factors
    return MarketOutcome(
        prices=prices,
        choices=choices,
        pre_tax_profits=pre_tax,
        net_profits=net,
        fairness=report,
        opt_out=choices[:, 0].copy(),
        welfare=welfare(net, report.global_score),
        converged=converged,
        rounds_used=rounds_used,
    )
