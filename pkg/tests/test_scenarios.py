import json
import subprocess
import sys

import numpy as np
import pytest

from fairmarket import (
    ConfigurationError,
    LIGHT_SETTINGS,
    PlannerConfig,
    RegimeSpec,
    SearchSettings,
    SolverSettings,
    TaxSchedule,
    compare_regimes,
    linear_baseline,
    load_bundled,
    load_market_config,
    run_regime,
    runtime_benchmark,
)
from fairmarket.scenarios import (
    benchmark_to_csv,
    bundled_config_path,
    comparison_to_csv,
    comparison_to_json,
    parse_comparison_csv,
    render_comparison,
    synthetic_market,
)

QUICK = SolverSettings(
    price_tolerance=1e-3,
    max_rounds=60,
    optimizer_tolerance=1e-4,
    max_optimizer_iterations=60,
    restarts=1,
)


class TestBundledConfigs:
    def test_insurance_calibration(self):
        config, planner = load_bundled("insurance")
        assert config.n == 2
        assert config.m == 3
        names = [p.name for p in config.profiles]
        sizes = dict(zip(names, config.sizes))
        betas = dict(zip(names, config.betas))
        assert sizes == {"H": 200.0, "M": 520.0, "L": 280.0}
        assert betas["H"] == 0.25 and betas["M"] == 0.70 and betas["L"] == 0.825
        np.testing.assert_allclose(config.marginal_costs[:, 0], [2.50, 3.00, 3.50])
        np.testing.assert_allclose(config.marginal_costs[:, 1], [2.25, 2.75, 3.25])
        assert planner.lam == 100.0
        assert planner.baseline.brackets == 20
        assert config.price_min == 1.0 and config.price_max == 20.0

    def test_credit_calibration(self):
        config, planner = load_bundled("credit")
        assert config.n == 5
        assert config.m == 3
        betas = dict(zip((p.name for p in config.profiles), config.betas))
        assert betas == {"H": 3.00, "M": 2.70, "L": 2.25}
        row_l = dict(
            zip((f.name for f in config.firms), config.marginal_costs[2])
        )
        assert row_l["B"] == 2.30
        np.testing.assert_allclose(
            config.marginal_costs[0], [0.40, 0.65, 0.45, 0.60, 0.44]
        )
        assert planner.lam == 10.0
        assert all(f.base_utility == 10.0 for f in config.firms)
        assert config.outside_utility == 0.0

    def test_unknown_bundle(self):
        with pytest.raises(ConfigurationError):
            bundled_config_path("equities")


class TestConfigLoading:
    def test_missing_field_is_named(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"profiles": [{"size": 10.0}]}))
        with pytest.raises(ConfigurationError, match="beta"):
            load_market_config(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError, match="JSON"):
            load_market_config(path)

    def test_marginal_cost_length_mismatch(self, tmp_path):
        raw = {
            "profiles": [{"name": "a", "size": 10, "beta": 0.5}],
            "firms": [
                {"name": "f", "base_utility": 5.0, "marginal_costs": [1.0, 2.0]}
            ],
            "outside_utility": 0.0,
            "price_min": 1.0,
            "price_max": 20.0,
            "planner": {"brackets": 4, "lambda": 1.0},
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(ConfigurationError, match="marginal_costs"):
            load_market_config(path)

    def test_explicit_baseline_rates(self, tmp_path):
        raw = {
            "profiles": [{"name": "a", "size": 10, "beta": 0.5}],
            "firms": [{"name": "f", "base_utility": 5.0, "marginal_costs": [1.0]}],
            "outside_utility": 0.0,
            "price_min": 1.0,
            "price_max": 20.0,
            "planner": {"brackets": 2, "lambda": 1.0, "baseline": [0.4, 0.1]},
        }
        path = tmp_path / "ok.json"
        path.write_text(json.dumps(raw))
        _, planner = load_market_config(path)
        assert planner.baseline.rates == (0.4, 0.1)


class TestRegimes:
    def test_unknown_regime_rejected(self):
        with pytest.raises(ConfigurationError):
            RegimeSpec("monopoly")

    def test_planner_sp_requires_settings(self):
        with pytest.raises(ConfigurationError):
            RegimeSpec("planner-sp")

    def test_single_bracket_zero_rate_equals_free_market(self):
        config, _ = load_bundled("insurance")
        planner = PlannerConfig(
            lam=0.0, baseline=linear_baseline(1), objective_kind="welfare-max"
        )
        free = run_regime(config, RegimeSpec("free-market"), QUICK)
        taxed = run_regime(
            config, RegimeSpec("linear-sp", planner_config=planner), QUICK
        )
        np.testing.assert_allclose(taxed.prices, free.prices, atol=1e-5)
        np.testing.assert_allclose(
            taxed.net_profits, free.pre_tax_profits, atol=1e-5
        )

    def test_collusion_untaxed(self):
        config, _ = load_bundled("insurance")
        outcome = run_regime(config, RegimeSpec("collusion"), QUICK)
        np.testing.assert_allclose(outcome.net_profits, outcome.pre_tax_profits)


def quick_report(seeds=(0, 1)):
    config, planner = load_bundled("insurance")
    search = SearchSettings(
        population_size=4, generations=2, evaluation_settings=LIGHT_SETTINGS
    )
    regimes = [
        RegimeSpec("free-market"),
        RegimeSpec("linear-sp", planner_config=planner),
        RegimeSpec("planner-sp", planner_config=planner, search=search),
        RegimeSpec("collusion"),
    ]
    return compare_regimes(config, regimes, QUICK, seeds=seeds)


@pytest.fixture(scope="module")
def report():
    return quick_report()


class TestComparison:
    def test_requires_collusion(self):
        config, _ = load_bundled("insurance")
        with pytest.raises(ConfigurationError):
            compare_regimes(config, [RegimeSpec("free-market")], QUICK, seeds=(0,))

    def test_welfare_identity(self, report):
        for row in report.rows:
            assert row.welfare == pytest.approx(
                row.normalized_profit * row.fairness, abs=1e-9
            )

    def test_delta_max_identity(self, report):
        for row in report.rows:
            group = np.array(row.group_opt_out)
            assert row.delta_max == pytest.approx(group.max() - group.min(), abs=1e-12)

    def test_collusion_profit_normalized_to_one(self, report):
        by_kind = {row.kind: row for row in report.rows}
        assert by_kind["collusion"].normalized_profit == pytest.approx(1.0, abs=1e-9)

    def test_csv_round_trip_is_exact(self, report):
        text = comparison_to_csv(report)
        parsed = parse_comparison_csv(text)
        for row, record in zip(report.rows, parsed):
            assert record["regime"] == row.kind
            assert record["normalized_profit"] == row.normalized_profit
            assert record["fairness"] == row.fairness
            assert record["welfare"] == row.welfare
            assert record["delta_max"] == row.delta_max
            for name, value in zip(report.group_names, row.group_opt_out):
                assert record[f"opt_out_{name}"] == value

    def test_json_contains_all_rows(self, report):
        payload = json.loads(comparison_to_json(report))
        assert [r["regime"] for r in payload["rows"]] == [r.kind for r in report.rows]
        assert payload["seeds"] == list(report.seeds)

    def test_render_mentions_every_regime(self, report):
        text = render_comparison(report)
        for row in report.rows:
            assert row.kind in text


class TestBenchmark:
    def test_synthetic_market_shape_and_determinism(self):
        a = synthetic_market(7)
        b = synthetic_market(7)
        assert a.n == 7 and a.m == 3
        np.testing.assert_array_equal(a.marginal_costs, b.marginal_costs)
        # jitter keeps costs within 5% of the cycled template
        template, _ = load_bundled("credit")
        for k, firm in enumerate(a.firms):
            base = np.array(template.firms[k % 5].marginal_costs)
            ratio = np.array(firm.marginal_costs) / base
            assert np.all(np.abs(ratio - 1.0) <= 0.05)
            assert ratio.max() - ratio.min() < 1e-12

    def test_too_few_firms(self):
        with pytest.raises(ConfigurationError):
            synthetic_market(1)

    def test_rows_and_csv(self):
        rows = runtime_benchmark([2, 3], rounds_per_trial=2, seeds=(0, 1))
        assert [r.firms for r in rows] == [2, 3]
        assert all(r.mean_seconds > 0 for r in rows)
        assert all(r.seeds == 2 for r in rows)
        text = benchmark_to_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0] == "firms,mean_seconds,std_seconds,seeds"
        assert len(lines) == 3


def run_cli(args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "fairmarket", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


class TestCli:
    def test_run_free_market(self):
        proc = run_cli(
            ["run", "--config", "insurance", "--tolerance", "1e-3", "--max-rounds", "60"]
        )
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["regime"] == "free-market"
        assert payload["converged"] is True
        assert len(payload["prices"]) == 3

    def test_missing_config_exits_one(self):
        proc = run_cli(["run", "--config", "/no/such/file.json"])
        assert proc.returncode == 1
        assert "error" in proc.stderr

    def test_usage_error_exits_one(self):
        proc = run_cli(["frobnicate"])
        assert proc.returncode == 1

    def test_planner_writes_outputs(self, tmp_path):
        out = tmp_path / "artifacts"
        proc = run_cli(
            [
                "planner",
                "--config",
                "credit",
                "--population",
                "4",
                "--generations",
                "2",
                "--out",
                str(out),
            ]
        )
        assert proc.returncode == 0
        schedule = (out / "schedule.csv").read_text()
        assert schedule.splitlines()[0] == "bracket_low,bracket_high,rate"
        assert len(schedule.splitlines()) == 21
        history = (out / "planner_history.csv").read_text()
        assert len(history.splitlines()) == 3

    def test_bench_writes_csv(self, tmp_path):
        out = tmp_path / "bench"
        proc = run_cli(
            [
                "bench",
                "--firms",
                "2,3",
                "--rounds",
                "2",
                "--seeds",
                "0",
                "--out",
                str(out),
            ]
        )
        assert proc.returncode == 0
        assert (out / "benchmark.csv").read_text() == proc.stdout

    def test_fairness_bound_reports_score(self):
        proc = run_cli(
            [
                "fairness-bound",
                "--config",
                "insurance",
                "--population",
                "4",
                "--generations",
                "2",
            ]
        )
        assert proc.returncode == 0
        bound = json.loads(proc.stdout)["global_fairness_bound"]
        assert 0.0 <= bound <= 1.0
