"""A first look at one market: choices, demand, fairness.

Builds a tiny two-firm insurance-style market by hand, prints who buys
what at a fixed price matrix, and reads off the fairness gaps.
"""

import numpy as np

from fairmarket import (
    ConsumerProfile,
    FirmSpec,
    MarketConfig,
    choice_probabilities,
    consumer_surplus,
    expected_demand,
    fairness_report,
    opt_out_rates,
)

config = MarketConfig(
    profiles=(
        ConsumerProfile("high-risk", size=200.0, beta=0.25),
        ConsumerProfile("mid-risk", size=520.0, beta=0.70),
        ConsumerProfile("low-risk", size=280.0, beta=0.825),
    ),
    firms=(
        FirmSpec("firm-A", base_utility=10.0, marginal_costs=(2.50, 3.00, 3.50)),
        FirmSpec("firm-B", base_utility=10.0, marginal_costs=(2.25, 2.75, 3.25)),
    ),
    outside_utility=0.0,
    price_min=1.0,
    price_max=20.0,
)

# firm A prices slightly above firm B for every group
prices = np.array([[8.0, 7.5], [6.0, 5.5], [5.5, 5.0]])

choices = choice_probabilities(config, prices)
demand = expected_demand(config, choices)
report = fairness_report(choices)

print("Choice probabilities (rows: groups; cols: opt-out, firm-A, firm-B)")
for profile, row in zip(config.profiles, choices):
    cells = "  ".join(f"{p:.4f}" for p in row)
    print(f"  {profile.name:<10} {cells}")

print("\nExpected demand per firm")
for j, firm in enumerate(config.firms):
    print(f"  {firm.name}: {demand[:, j].sum():.1f} customers")

print("\nOpt-out rates per group:", np.round(opt_out_rates(choices), 4))
print("Local fairness scores:  ", np.round(report.local_scores, 4))
print("Global fairness score:  ", round(report.global_score, 4))
print("Consumer surplus:       ", np.round(consumer_surplus(config, prices), 3))
