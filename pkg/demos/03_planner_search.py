"""Search a tax schedule for the credit market and inspect the result.

Shows the cross-entropy search converging, the bracket table it settles
on, and how the searched schedule compares to the linear baseline.
"""

from fairmarket import (
    LIGHT_SETTINGS,
    SearchSettings,
    evaluate_schedule,
    load_bundled,
    search_schedule,
)

config, planner_config = load_bundled("credit")

search = SearchSettings(population_size=16, generations=30, seed=0)
result = search_schedule(config, planner_config, search)

print("Best objective by generation (every 5th):")
for g in range(0, len(result.history), 5):
    print(f"  gen {g:>3}  {result.history[g]:.4f}")
print(f"  final    {result.best_objective:.4f}")

baseline_objective, _ = evaluate_schedule(
    config, planner_config.baseline, planner_config, LIGHT_SETTINGS
)
print(f"\nLinear baseline objective: {baseline_objective:.4f}")
print(f"Searched improvement:      {result.best_objective - baseline_objective:+.4f}")

print("\nSchedule (fairness bracket -> tax rate, baseline in parentheses):")
brackets = result.best_schedule.brackets
for b, (rate, base) in enumerate(
    zip(result.best_schedule.rates, planner_config.baseline.rates), start=1
):
    lo, hi = (b - 1) / brackets, b / brackets
    print(f"  [{lo:.2f}, {hi:.2f})  {rate:.3f}  ({base:.3f})")

outcome = result.best_outcome
print(f"\nGlobal fairness under best schedule: {outcome.fairness.global_score:.4f}")
print(f"Mean net profit:                     {outcome.net_profits.mean():.2f}")
