import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmarket import (
    ConfigurationError,
    DomainError,
    PlannerConfig,
    TaxSchedule,
    bracket_index,
    l1_penalty,
    linear_baseline,
    net_profit,
    planner_objective,
    welfare,
)


class TestBracketIndex:
    def test_interior(self):
        assert bracket_index(0.37, 20) == 8  # 0.37 in [0.35, 0.40)

    def test_zero(self):
        assert bracket_index(0.0, 20) == 1

    def test_one_clamps_to_top(self):
        assert bracket_index(1.0, 20) == 20

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            bracket_index(-0.1, 20)
        with pytest.raises(DomainError):
            bracket_index(1.1, 20)

    @given(st.integers(1, 50), st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_half_open_membership(self, brackets, f):
        b = bracket_index(f, brackets)
        assert 1 <= b <= brackets

    def test_nondecreasing_with_exactly_b_levels(self):
        brackets = 7
        values = [bracket_index(f, brackets) for f in np.linspace(0.0, 1.0, 10_000)]
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert sorted(set(values)) == list(range(1, brackets + 1))


class TestLinearBaseline:
    def test_twenty_brackets(self):
        schedule = linear_baseline(20)
        assert schedule.rates[0] == pytest.approx(0.95, abs=1e-15)
        assert schedule.rates[-1] == 0.0

    def test_single_bracket(self):
        assert linear_baseline(1).rates == (0.0,)

    def test_four_brackets(self):
        np.testing.assert_allclose(linear_baseline(4).rates, (0.75, 0.5, 0.25, 0.0))

    def test_strictly_decreasing(self):
        for brackets in (2, 3, 10, 20, 33):
            rates = linear_baseline(brackets).rates
            assert all(a > b for a, b in zip(rates, rates[1:]))


class TestNetProfit:
    def test_zero_tax_passthrough(self):
        schedule = TaxSchedule((0.0,))
        assert net_profit(123.0, 0.5, schedule) == 123.0

    def test_full_tax(self):
        schedule = TaxSchedule((1.0,))
        assert net_profit(123.0, 0.5, schedule) == 0.0

    def test_composed_with_linear_baseline(self):
        # f = 0.37 -> bracket 8 -> rate 1 - 8/20 = 0.6
        assert net_profit(100.0, 0.37, linear_baseline(20)) == pytest.approx(40.0)

    def test_loss_passes_through(self):
        schedule = TaxSchedule((0.25,))
        assert net_profit(-100.0, 0.5, schedule) == pytest.approx(-75.0)

    def test_nonincreasing_in_rate(self):
        profits = [net_profit(50.0, 0.0, TaxSchedule((rate,))) for rate in np.linspace(0, 1, 11)]
        assert all(a >= b for a, b in zip(profits, profits[1:]))


class TestWelfare:
    def test_zero_score(self):
        assert welfare([1.0, 2.0], 0.0) == 0.0

    def test_mean_times_score(self):
        assert welfare([2.0, 4.0], 0.5) == pytest.approx(1.5)

    def test_published_row_consistency(self):
        assert round(0.697 * 0.821, 3) == 0.572
        assert round(0.707 * 0.895, 3) == 0.633

    def test_bounded_by_mean_profit(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            profits = rng.uniform(0, 10, size=4)
            score = rng.uniform(0, 1)
            w = welfare(profits, score)
            assert 0.0 <= w <= profits.mean() + 1e-12

    def test_invalid_score(self):
        with pytest.raises(DomainError):
            welfare([1.0], 1.5)


def planner_config(baseline, lam=1.0, kind="welfare-max"):
    return PlannerConfig(lam=lam, baseline=baseline, objective_kind=kind)


class TestL1Penalty:
    def test_zero_at_baseline(self):
        baseline = linear_baseline(20)
        assert l1_penalty(baseline, planner_config(baseline, lam=100.0)) == 0.0

    def test_zero_lambda(self):
        baseline = linear_baseline(4)
        tau = TaxSchedule((0.9, 0.1, 0.5, 0.2))
        assert l1_penalty(tau, planner_config(baseline, lam=0.0)) == 0.0

    def test_weighted_deviation(self):
        baseline = TaxSchedule((0.5, 0.0))
        tau = TaxSchedule((0.6, 0.1))
        assert l1_penalty(tau, planner_config(baseline, lam=10.0)) == pytest.approx(2.0)

    def test_bracket_mismatch(self):
        with pytest.raises(ConfigurationError):
            l1_penalty(TaxSchedule((0.1,)), planner_config(linear_baseline(2)))

    @given(
        st.lists(st.floats(0, 1), min_size=3, max_size=3),
        st.lists(st.floats(0, 1), min_size=3, max_size=3),
        st.lists(st.floats(0, 1), min_size=3, max_size=3),
    )
    @settings(max_examples=100, deadline=None)
    def test_scaled_metric_properties(self, a, b, c):
        lam = 5.0
        base = TaxSchedule(tuple(b))
        config = planner_config(base, lam=lam)
        ta, tc = TaxSchedule(tuple(a)), TaxSchedule(tuple(c))
        # symmetry: swap roles of schedule and baseline
        assert l1_penalty(ta, config) == pytest.approx(
            l1_penalty(base, planner_config(ta, lam=lam)), abs=1e-12
        )
        # identity of indiscernibles
        assert l1_penalty(base, config) == 0.0
        if a != list(b):
            assert l1_penalty(ta, config) >= 0.0
        # triangle inequality through c
        direct = l1_penalty(ta, config)
        via = l1_penalty(ta, planner_config(tc, lam=lam)) + l1_penalty(
            tc, config
        )
        assert direct <= via + 1e-9


class TestPlannerObjective:
    def test_no_penalty(self):
        assert planner_objective(0.6, 0.0) == 0.6

    def test_penalty_dominates(self):
        assert planner_objective(0.6, 2.0) == pytest.approx(-1.4)

    def test_schedule_validation(self):
        with pytest.raises(ConfigurationError):
            TaxSchedule((1.2,))
        with pytest.raises(ConfigurationError):
            TaxSchedule(())
