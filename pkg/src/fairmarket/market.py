"""Logit market core: profiles, firms, choice probabilities, demand, surplus.

Consumers are modelled as population segments ("profiles").  A consumer of
profile i derives utility ``base_utility_j - beta_i * price`` from firm j's
product and a fixed utility from staying out of the market.  Segment-level
choices follow a multinomial logit over the outside option and the n firms.

Conventions used throughout the package:

* price matrices are ``(m, n)`` arrays indexed ``[profile, firm]``;
* choice matrices are ``(m, n + 1)`` arrays whose column 0 is the outside
  option, so firm j occupies column ``j + 1``.

All functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigurationError, DomainError, NumericError

#: Tolerance for choice-matrix row sums.
ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ConsumerProfile:
    """One population segment: how many consumers and how price-sensitive."""

    name: str
    size: float
    beta: float

    def __post_init__(self) -> None:
        if not self.size > 0:
            raise ConfigurationError(
                f"profile {self.name!r}: size must be positive, got {self.size}"
            )
        if self.beta < 0:
            raise ConfigurationError(
                f"profile {self.name!r}: beta must be nonnegative, got {self.beta}"
            )


@dataclass(frozen=True)
class FirmSpec:
    """One firm: base product utility and per-profile marginal costs."""

    name: str
    base_utility: float
    marginal_costs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "marginal_costs", tuple(float(c) for c in self.marginal_costs))
        for c in self.marginal_costs:
            if c < 0:
                raise ConfigurationError(
                    f"firm {self.name!r}: marginal costs must be nonnegative, got {c}"
                )


@dataclass(frozen=True)
class MarketConfig:
    """Immutable description of one market instance."""

    profiles: tuple[ConsumerProfile, ...]
    firms: tuple[FirmSpec, ...]
    outside_utility: float = 0.0
    price_min: float = 1.0
    price_max: float = 20.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "profiles", tuple(self.profiles))
        object.__setattr__(self, "firms", tuple(self.firms))
        if len(self.profiles) < 1:
            raise ConfigurationError("at least one consumer profile is required")
        if len(self.firms) < 1:
            raise ConfigurationError("at least one firm is required")
        if not (0 <= self.price_min < self.price_max):
            raise ConfigurationError(
                f"price bounds must satisfy 0 <= price_min < price_max, "
                f"got [{self.price_min}, {self.price_max}]"
            )
        m = len(self.profiles)
        for firm in self.firms:
            if len(firm.marginal_costs) != m:
                raise ConfigurationError(
                    f"firm {firm.name!r}: expected {m} marginal costs "
                    f"(one per profile), got {len(firm.marginal_costs)}"
                )

    @property
    def m(self) -> int:
        return len(self.profiles)

    @property
    def n(self) -> int:
        return len(self.firms)

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([p.size for p in self.profiles], dtype=float)

    @cached_property
    def betas(self) -> np.ndarray:
        return np.array([p.beta for p in self.profiles], dtype=float)

    @cached_property
    def base_utilities(self) -> np.ndarray:
        return np.array([f.base_utility for f in self.firms], dtype=float)

    @cached_property
    def marginal_costs(self) -> np.ndarray:
        """(m, n) grid of marginal costs, indexed [profile, firm]."""
        return np.array([f.marginal_costs for f in self.firms], dtype=float).T

    def midpoint_prices(self) -> np.ndarray:
        return np.full((self.m, self.n), 0.5 * (self.price_min + self.price_max))


def validate_prices(config: MarketConfig, prices: np.ndarray) -> np.ndarray:
    """Check shape, finiteness, and bounds of a price matrix; return it as float array."""
    prices = np.asarray(prices, dtype=float)
    if prices.shape != (config.m, config.n):
        raise ConfigurationError(
            f"price matrix must have shape {(config.m, config.n)}, got {prices.shape}"
        )
    if not np.all(np.isfinite(prices)):
        raise NumericError("price matrix contains non-finite entries")
    # allow a hair of slack for optimizer round-off at the box boundary
    if prices.min() < config.price_min - 1e-9 or prices.max() > config.price_max + 1e-9:
        raise ConfigurationError(
            f"prices must lie in [{config.price_min}, {config.price_max}]"
        )
    return prices


def validate_choices(choices: np.ndarray) -> np.ndarray:
    """Check that a choice matrix is strictly positive and row-stochastic."""
    choices = np.asarray(choices, dtype=float)
    if choices.ndim != 2 or choices.shape[1] < 2:
        raise ConfigurationError("choice matrix must be (m, n + 1) with n >= 1")
    if choices.min() <= 0:
        raise ConfigurationError("choice matrix entries must be strictly positive")
    if np.abs(choices.sum(axis=1) - 1.0).max() > ROW_SUM_TOL:
        raise ConfigurationError("choice matrix rows must sum to 1")
    return choices


def utility(config: MarketConfig, i: int, j: int, price: float) -> float:
    """Utility of profile ``i`` for option ``j`` (0 = outside, 1..n = firms) at ``price``.

    The outside option ignores the price argument.
    """
    if not 0 <= i < config.m:
        raise ConfigurationError(f"profile index {i} out of range [0, {config.m})")
    if not 0 <= j <= config.n:
        raise ConfigurationError(f"option index {j} out of range [0, {config.n}]")
    if j == 0:
        return float(config.outside_utility)
    if not np.isfinite(price):
        raise NumericError("price must be finite")
    return float(config.firms[j - 1].base_utility - config.profiles[i].beta * price)


def utility_matrix(config: MarketConfig, prices: np.ndarray) -> np.ndarray:
    """(m, n + 1) utility grid with the outside option in column 0."""
    u = np.empty((config.m, config.n + 1))
    u[:, 0] = config.outside_utility
    u[:, 1:] = config.base_utilities[None, :] - config.betas[:, None] * prices
    return u


def choice_probabilities(config: MarketConfig, prices: np.ndarray) -> np.ndarray:
    """Per-profile logit choice probabilities over {outside, firm 1, ..., firm n}.

    Each row is a softmax of that profile's utilities, computed with the
    row maximum subtracted so large utilities cannot overflow.
    """
    prices = validate_prices(config, prices)
    u = utility_matrix(config, prices)
    if not np.all(np.isfinite(u)):
        raise NumericError("utilities are not finite; check config and prices")
    z = np.exp(u - u.max(axis=1, keepdims=True))
    return z / z.sum(axis=1, keepdims=True)


def expected_demand(config: MarketConfig, choices: np.ndarray) -> np.ndarray:
    """(m, n) expected consumer counts: segment size times firm choice probability."""
    choices = validate_choices(choices)
    if choices.shape != (config.m, config.n + 1):
        raise ConfigurationError(
            f"choice matrix must have shape {(config.m, config.n + 1)}, got {choices.shape}"
        )
    return config.sizes[:, None] * choices[:, 1:]


def opt_out_rates(choices: np.ndarray) -> np.ndarray:
    """Per-profile probability of choosing the outside option (column 0)."""
    return validate_choices(choices)[:, 0].copy()


def consumer_surplus(config: MarketConfig, prices: np.ndarray) -> np.ndarray:
    """Per-profile log-sum surplus: (1/beta_i) * log sum_j exp(alpha_j - beta_i p_ij).

    The sum runs over the n firms only.  Undefined for beta = 0.
    """
    prices = validate_prices(config, prices)
    if np.any(config.betas <= 0):
        raise DomainError("consumer surplus requires beta > 0 for every profile")
    exponents = config.base_utilities[None, :] - config.betas[:, None] * prices
    return logsumexp(exponents, axis=1) / config.betas
