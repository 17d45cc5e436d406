"""Market regimes, comparison reports, config files, and the runtime benchmark.

Four regimes are supported:

* ``free-market``  — best-response competition, no tax;
* ``linear-sp``    — competition under the fixed linear bracket schedule;
* ``planner-sp``   — competition under the searched schedule;
* ``collusion``    — joint profit maximization, untaxed; serves as the
  profit normalizer for comparison reports.

Comparison reports mirror the usual profit / fairness / opt-out / welfare
summary: profits are normalized by the collusive optimum, welfare is the
product of normalized profit and global fairness, and per-group opt-out
means come with their largest pairwise difference.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .equilibrium import (
    SolverSettings,
    collusive_optimum,
    compute_outcome,
    nash_equilibrium,
)
from .errors import ConfigurationError
from .market import ConsumerProfile, FirmSpec, MarketConfig
from .planner import SearchSettings, search_schedule
from .tax import MarketOutcome, PlannerConfig, TaxSchedule, linear_baseline

REGIME_KINDS = ("free-market", "linear-sp", "planner-sp", "collusion")


@dataclass(frozen=True)
class RegimeSpec:
    """One market regime to run, with planner settings where applicable."""

    kind: str
    planner_config: PlannerConfig | None = None
    search: SearchSettings | None = None

    def __post_init__(self) -> None:
        if self.kind not in REGIME_KINDS:
            raise ConfigurationError(
                f"unknown regime {self.kind!r}; expected one of {REGIME_KINDS}"
            )
        if self.kind == "planner-sp" and (
            self.planner_config is None or self.search is None
        ):
            raise ConfigurationError(
                "planner-sp regime requires planner_config and search settings"
            )


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigurationError(f"{context}: missing required field {key!r}")
    return mapping[key]


def _parse_market(raw: dict) -> MarketConfig:
    profiles = []
    for idx, entry in enumerate(_require(raw, "profiles", "config")):
        name = entry.get("name", f"profile_{idx}")
        profiles.append(
            ConsumerProfile(
                name=name,
                size=float(_require(entry, "size", f"profiles[{idx}]")),
                beta=float(_require(entry, "beta", f"profiles[{idx}]")),
            )
        )
    firms = []
    for idx, entry in enumerate(_require(raw, "firms", "config")):
        name = entry.get("name", f"firm_{idx}")
        mc = _require(entry, "marginal_costs", f"firms[{idx}]")
        if len(mc) != len(profiles):
            raise ConfigurationError(
                f"firms[{idx}] ({name!r}): marginal_costs has {len(mc)} entries "
                f"but there are {len(profiles)} profiles"
            )
        firms.append(
            FirmSpec(
                name=name,
                base_utility=float(_require(entry, "base_utility", f"firms[{idx}]")),
                marginal_costs=tuple(float(c) for c in mc),
            )
        )
    return MarketConfig(
        profiles=tuple(profiles),
        firms=tuple(firms),
        outside_utility=float(_require(raw, "outside_utility", "config")),
        price_min=float(_require(raw, "price_min", "config")),
        price_max=float(_require(raw, "price_max", "config")),
    )


def _parse_planner(raw: dict) -> PlannerConfig:
    planner = _require(raw, "planner", "config")
    brackets = int(_require(planner, "brackets", "planner"))
    baseline_kind = planner.get("baseline", "linear")
    if baseline_kind == "linear":
        baseline = linear_baseline(brackets)
    elif isinstance(baseline_kind, list):
        baseline = TaxSchedule(tuple(float(r) for r in baseline_kind))
        if baseline.brackets != brackets:
            raise ConfigurationError(
                "planner.baseline: rate list length must equal planner.brackets"
            )
    else:
        raise ConfigurationError(
            "planner.baseline must be 'linear' or an explicit rate list"
        )
    return PlannerConfig(
        lam=float(_require(planner, "lambda", "planner")),
        baseline=baseline,
        objective_kind=planner.get("objective", "welfare-max"),
        tau_min=float(planner.get("tau_min", 0.0)),
        tau_max=float(planner.get("tau_max", 1.0)),
    )


def load_market_config(path: str | Path) -> tuple[MarketConfig, PlannerConfig]:
    """Read and validate a JSON market description.

    Raises :class:`ConfigurationError` naming the offending field when the
    file does not match the expected schema.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return _parse_market(raw), _parse_planner(raw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"{path}: {exc}") from exc


def bundled_config_path(name: str) -> Path:
    """Filesystem path of a bundled calibration ('insurance' or 'credit')."""
    candidate = resources.files("fairmarket").joinpath("data", f"{name}.json")
    if not candidate.is_file():
        raise ConfigurationError(f"no bundled config named {name!r}")
    return Path(str(candidate))


def load_bundled(name: str) -> tuple[MarketConfig, PlannerConfig]:
    return load_market_config(bundled_config_path(name))


# ---------------------------------------------------------------------------
# Regimes
# ---------------------------------------------------------------------------


def run_regime(
    config: MarketConfig,
    regime: RegimeSpec,
    settings: SolverSettings = SolverSettings(),
) -> MarketOutcome:
    """Resolve one regime to a market outcome."""
    if regime.kind == "free-market":
        eq = nash_equilibrium(config, None, settings)
        return compute_outcome(
            config, eq.prices, None, converged=eq.converged, rounds_used=eq.rounds_used
        )
    if regime.kind == "linear-sp":
        if regime.planner_config is not None:
            schedule = regime.planner_config.baseline
        else:
            schedule = linear_baseline(20)
        eq = nash_equilibrium(config, schedule, settings)
        return compute_outcome(
            config, eq.prices, schedule, converged=eq.converged, rounds_used=eq.rounds_used
        )
    if regime.kind == "planner-sp":
        assert regime.planner_config is not None and regime.search is not None
        result = search_schedule(config, regime.planner_config, regime.search)
        eq = nash_equilibrium(config, result.best_schedule, settings)
        return compute_outcome(
            config,
            eq.prices,
            result.best_schedule,
            converged=eq.converged,
            rounds_used=eq.rounds_used,
        )
    eq = collusive_optimum(config, settings)
    return compute_outcome(config, eq.prices, None)


# ---------------------------------------------------------------------------
# Comparison report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeRow:
    """Seed-aggregated summary of one regime."""

    kind: str
    normalized_profit: float
    normalized_profit_se: float
    fairness: float
    fairness_se: float
    opt_out: float
    opt_out_se: float
    welfare: float
    group_opt_out: tuple[float, ...]
    delta_max: float
    prices: np.ndarray


@dataclass(frozen=True)
class ComparisonReport:
    group_names: tuple[str, ...]
    rows: tuple[RegimeRow, ...]
    seeds: tuple[int, ...]


def _standard_error(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))


def compare_regimes(
    config: MarketConfig,
    regimes: Sequence[RegimeSpec],
    settings: SolverSettings = SolverSettings(),
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
) -> ComparisonReport:
    """Run every regime once per seed and aggregate into a comparison table.

    Collusion must be among the regimes: its aggregate pre-tax profit is the
    normalizer that makes profits comparable across regimes.
    """
    kinds = [r.kind for r in regimes]
    if "collusion" not in kinds:
        raise ConfigurationError("compare_regimes requires the collusion regime")
    seeds = tuple(int(s) for s in seeds)

    per_regime: dict[str, dict[str, list]] = {
        r.kind: {"profit": [], "fairness": [], "opt_out": [], "group": [], "prices": []}
        for r in regimes
    }
    weights = config.sizes / config.sizes.sum()
    for seed in seeds:
        seed_settings = replace(settings, seed=seed)
        outcomes: dict[str, MarketOutcome] = {}
        for regime in regimes:
            if regime.kind == "planner-sp":
                regime = replace(regime, search=replace(regime.search, seed=seed))
            outcomes[regime.kind] = run_regime(config, regime, seed_settings)
        normalizer = outcomes["collusion"].pre_tax_profits.mean()
        for kind, outcome in outcomes.items():
            acc = per_regime[kind]
            acc["profit"].append(outcome.net_profits.mean() / normalizer)
            acc["fairness"].append(outcome.fairness.global_score)
            acc["opt_out"].append(float(weights @ outcome.opt_out))
            acc["group"].append(outcome.opt_out)
            acc["prices"].append(outcome.prices)

    rows = []
    for regime in regimes:
        acc = per_regime[regime.kind]
        profit = np.array(acc["profit"])
        fair = np.array(acc["fairness"])
        opt = np.array(acc["opt_out"])
        group = np.mean(acc["group"], axis=0)
        rows.append(
            RegimeRow(
                kind=regime.kind,
                normalized_profit=float(profit.mean()),
                normalized_profit_se=_standard_error(profit),
                fairness=float(fair.mean()),
                fairness_se=_standard_error(fair),
                opt_out=float(opt.mean()),
                opt_out_se=_standard_error(opt),
                welfare=float(profit.mean()) * float(fair.mean()),
                group_opt_out=tuple(float(g) for g in group),
                delta_max=float(group.max() - group.min()),
                prices=np.mean(acc["prices"], axis=0),
            )
        )
    return ComparisonReport(
        group_names=tuple(p.name for p in config.profiles),
        rows=tuple(rows),
        seeds=seeds,
    )


def comparison_to_csv(report: ComparisonReport) -> str:
    """Lossless CSV rendering of the aggregate columns (floats via repr)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = [
        "regime",
        "normalized_profit",
        "normalized_profit_se",
        "fairness",
        "fairness_se",
        "opt_out",
        "opt_out_se",
        "welfare",
        *[f"opt_out_{name}" for name in report.group_names],
        "delta_max",
    ]
    writer.writerow(header)
    for row in report.rows:
        writer.writerow(
            [
                row.kind,
                repr(row.normalized_profit),
                repr(row.normalized_profit_se),
                repr(row.fairness),
                repr(row.fairness_se),
                repr(row.opt_out),
                repr(row.opt_out_se),
                repr(row.welfare),
                *[repr(g) for g in row.group_opt_out],
                repr(row.delta_max),
            ]
        )
    return buffer.getvalue()


def parse_comparison_csv(text: str) -> list[dict]:
    """Inverse of :func:`comparison_to_csv` (numeric fields back to float)."""
    rows = []
    for record in csv.DictReader(io.StringIO(text)):
        parsed = {"regime": record.pop("regime")}
        parsed.update({key: float(value) for key, value in record.items()})
        rows.append(parsed)
    return rows


def comparison_to_json(report: ComparisonReport) -> str:
    payload = {
        "seeds": list(report.seeds),
        "group_names": list(report.group_names),
        "rows": [
            {
                "regime": row.kind,
                "normalized_profit": row.normalized_profit,
                "normalized_profit_se": row.normalized_profit_se,
                "fairness": row.fairness,
                "fairness_se": row.fairness_se,
                "opt_out": row.opt_out,
                "opt_out_se": row.opt_out_se,
                "welfare": row.welfare,
                "group_opt_out": list(row.group_opt_out),
                "delta_max": row.delta_max,
                "prices": row.prices.tolist(),
            }
            for row in report.rows
        ],
    }
    return json.dumps(payload, indent=2)


def render_comparison(report: ComparisonReport) -> str:
    """Human-readable table; standard errors under 0.001 are omitted."""

    def cell(value: float, se: float) -> str:
        if se >= 0.001:
            return f"{value:.3f} ± {se:.3f}"
        return f"{value:.3f}"

    lines = [
        f"{'Regime':<14} {'Profit':>16} {'Fairness':>16} {'Opt Out':>16} {'Welfare':>10}"
    ]
    for row in report.rows:
        lines.append(
            f"{row.kind:<14}"
            f" {cell(row.normalized_profit, row.normalized_profit_se):>16}"
            f" {cell(row.fairness, row.fairness_se):>16}"
            f" {cell(row.opt_out, row.opt_out_se):>16}"
            f" {row.welfare:>10.3f}"
        )
    lines.append("")
    lines.append("Group opt-out means (max gap in last column):")
    header = " ".join(f"{name:>10}" for name in report.group_names)
    lines.append(f"{'Regime':<14} {header} {'Δmax':>10}")
    for row in report.rows:
        cells = " ".join(f"{g:>10.4f}" for g in row.group_opt_out)
        lines.append(f"{row.kind:<14} {cells} {row.delta_max:>10.4f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Runtime benchmark
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkRow:
    firms: int
    mean_seconds: float
    std_seconds: float
    seeds: int


def synthetic_market(n_firms: int, template: MarketConfig | None = None) -> MarketConfig:
    """Market with ``n_firms`` firms built by cycling a template's firms.

    Marginal costs get a deterministic ±5% jitter per firm so replicas are
    not exact clones.
    """
    if n_firms < 2:
        raise ConfigurationError(f"benchmark markets need >= 2 firms, got {n_firms}")
    if template is None:
        template, _ = load_bundled("credit")
    firms = []
    for k in range(n_firms):
        base = template.firms[k % template.n]
        jitter = 1.0 + np.random.default_rng(1000 + k).uniform(-0.05, 0.05)
        firms.append(
            FirmSpec(
                name=f"firm_{k}",
                base_utility=base.base_utility,
                marginal_costs=tuple(c * jitter for c in base.marginal_costs),
            )
        )
    return MarketConfig(
        profiles=template.profiles,
        firms=tuple(firms),
        outside_utility=template.outside_utility,
        price_min=template.price_min,
        price_max=template.price_max,
    )


def runtime_benchmark(
    firm_counts: Sequence[int],
    rounds_per_trial: int = 10,
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
    settings: SolverSettings | None = None,
) -> list[BenchmarkRow]:
    """Wall-clock cost of a fixed number of price-game rounds per firm count.

    Trials run strictly one at a time so timings are not skewed by
    contention.
    """
    if settings is None:
        settings = SolverSettings(restarts=1)
    rows = []
    for n_firms in firm_counts:
        config = synthetic_market(int(n_firms))
        times = []
        for seed in seeds:
            trial_settings = replace(
                settings, seed=int(seed), max_rounds=rounds_per_trial
            )
            start = time.perf_counter()
            nash_equilibrium(config, None, trial_settings, stop_on_convergence=False)
            times.append(time.perf_counter() - start)
        times = np.array(times)
        rows.append(
            BenchmarkRow(
                firms=int(n_firms),
                mean_seconds=float(times.mean()),
                std_seconds=float(times.std(ddof=1)) if times.size > 1 else 0.0,
                seeds=len(times),
            )
        )
    return rows


def benchmark_to_csv(rows: Sequence[BenchmarkRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["firms", "mean_seconds", "std_seconds", "seeds"])
    for row in rows:
        writer.writerow(
            [row.firms, repr(row.mean_seconds), repr(row.std_seconds), row.seeds]
        )
    return buffer.getvalue()
