"""Command-line surface.

Subcommands::

    run            one regime, JSON outcome to stdout or a file
    compare        regime comparison table as CSV + JSON
    planner        schedule search; bracket table to stdout, history CSV
    fairness-bound empirical global-fairness ceiling for a market
    bench          wall-clock scaling benchmark, CSV output

Exit status: 0 on success, 1 on validation/usage errors, 2 on numeric
failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .equilibrium import SolverSettings
from .errors import ConfigurationError, DomainError, NumericError
from .planner import SearchSettings, fairness_upper_bound, search_schedule
from .scenarios import (
    RegimeSpec,
    benchmark_to_csv,
    bundled_config_path,
    compare_regimes,
    comparison_to_csv,
    comparison_to_json,
    load_market_config,
    render_comparison,
    run_regime,
    runtime_benchmark,
)
from .tax import MarketOutcome


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="market config JSON path")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--seeds", default=None, help="comma-separated seed list (e.g. 0,1,2,3,4)"
    )
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument(
        "--tolerance", type=float, default=1e-4, help="price convergence tolerance"
    )
    parser.add_argument("--max-rounds", type=int, default=200)


def _add_budget(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--population", type=int, default=64)
    parser.add_argument("--generations", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairmarket")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one regime")
    _add_common(run)
    _add_budget(run)
    run.add_argument(
        "--regime",
        choices=("free-market", "linear-sp", "planner-sp", "collusion"),
        default="free-market",
    )

    compare = sub.add_parser("compare", help="compare regimes")
    _add_common(compare)
    _add_budget(compare)

    planner = sub.add_parser("planner", help="search a tax schedule")
    _add_common(planner)
    _add_budget(planner)

    bound = sub.add_parser("fairness-bound", help="fairness-maximizing ablation")
    _add_common(bound)
    _add_budget(bound)

    bench = sub.add_parser("bench", help="runtime scaling benchmark")
    bench.add_argument("--firms", default="2,20,40,60,80,100")
    bench.add_argument("--rounds", type=int, default=10)
    bench.add_argument("--seeds", default="0,1,2,3,4")
    bench.add_argument("--out", default=None)
    bench.add_argument("--tolerance", type=float, default=1e-4)
    bench.add_argument("--max-rounds", type=int, default=200)

    return parser


def _seed_list(args) -> tuple[int, ...]:
    if getattr(args, "seeds", None):
        return tuple(int(s) for s in str(args.seeds).split(",") if s != "")
    return (args.seed,)


def _settings(args) -> SolverSettings:
    return SolverSettings(
        price_tolerance=args.tolerance, max_rounds=args.max_rounds, seed=args.seed
    )


def _search_settings(args, settings: SolverSettings) -> SearchSettings:
    return SearchSettings(
        population_size=args.population,
        generations=args.generations,
        seed=args.seed,
    )


def _resolve_config(path: str) -> Path:
    candidate = Path(path)
    if candidate.exists():
        return candidate
    if path in ("insurance", "credit"):
        return bundled_config_path(path)
    raise ConfigurationError(f"config file not found: {path}")


def _outcome_payload(outcome: MarketOutcome, regime: str) -> dict:
    return {
        "regime": regime,
        "prices": outcome.prices.tolist(),
        "choices": outcome.choices.tolist(),
        "pre_tax_profits": outcome.pre_tax_profits.tolist(),
        "net_profits": outcome.net_profits.tolist(),
        "fairness": {
            "local_gaps": list(outcome.fairness.local_gaps),
            "local_scores": list(outcome.fairness.local_scores),
            "global_gap": outcome.fairness.global_gap,
            "global_score": outcome.fairness.global_score,
        },
        "opt_out": outcome.opt_out.tolist(),
        "welfare": outcome.welfare,
        "converged": outcome.converged,
        "rounds_used": outcome.rounds_used,
    }


def _write(out_dir: str | None, name: str, text: str) -> None:
    if out_dir is None:
        return
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / name).write_text(text)


def schedule_table(rates) -> str:
    """Render a schedule as bracket_low,bracket_high,rate CSV rows."""
    brackets = len(rates)
    lines = ["bracket_low,bracket_high,rate"]
    for b, rate in enumerate(rates, start=1):
        lines.append(f"{(b - 1) / brackets!r},{b / brackets!r},{rate!r}")
    return "\n".join(lines) + "\n"


def _cmd_run(args) -> int:
    config, planner_config = load_market_config(_resolve_config(args.config))
    settings = _settings(args)
    regime = RegimeSpec(
        kind=args.regime,
        planner_config=planner_config,
        search=_search_settings(args, settings) if args.regime == "planner-sp" else None,
    )
    outcome = run_regime(config, regime, settings)
    text = json.dumps(_outcome_payload(outcome, args.regime), indent=2) + "\n"
    if args.out:
        _write(args.out, f"outcome_{args.regime}.json", text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_compare(args) -> int:
    config, planner_config = load_market_config(_resolve_config(args.config))
    settings = _settings(args)
    search = _search_settings(args, settings)
    regimes = [
        RegimeSpec("free-market"),
        RegimeSpec("linear-sp", planner_config=planner_config),
        RegimeSpec("planner-sp", planner_config=planner_config, search=search),
        RegimeSpec("collusion"),
    ]
    report = compare_regimes(config, regimes, settings, seeds=_seed_list(args))
    sys.stdout.write(render_comparison(report))
    _write(args.out, "comparison.csv", comparison_to_csv(report))
    _write(args.out, "comparison.json", comparison_to_json(report))
    return 0


def _cmd_planner(args) -> int:
    config, planner_config = load_market_config(_resolve_config(args.config))
    settings = _settings(args)
    result = search_schedule(config, planner_config, _search_settings(args, settings))
    table = schedule_table(result.best_schedule.rates)
    sys.stdout.write(table)
    history = "generation,best_objective\n" + "".join(
        f"{g},{value!r}\n" for g, value in enumerate(result.history)
    )
    _write(args.out, "schedule.csv", table)
    _write(args.out, "planner_history.csv", history)
    return 0


def _cmd_fairness_bound(args) -> int:
    config, planner_config = load_market_config(_resolve_config(args.config))
    settings = _settings(args)
    search = _search_settings(args, settings)
    bound = fairness_upper_bound(
        config, search, brackets=planner_config.baseline.brackets
    )
    payload = json.dumps({"global_fairness_bound": bound}, indent=2) + "\n"
    sys.stdout.write(payload)
    _write(args.out, "fairness_bound.json", payload)
    return 0


def _cmd_bench(args) -> int:
    firm_counts = [int(f) for f in str(args.firms).split(",") if f != ""]
    seeds = [int(s) for s in str(args.seeds).split(",") if s != ""]
    rows = runtime_benchmark(firm_counts, rounds_per_trial=args.rounds, seeds=seeds)
    text = benchmark_to_csv(rows)
    sys.stdout.write(text)
    _write(args.out, "benchmark.csv", text)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "compare": _cmd_compare,
    "planner": _cmd_planner,
    "fairness-bound": _cmd_fairness_bound,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigurationError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
