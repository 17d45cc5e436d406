"""Compare the four market regimes on the bundled insurance calibration.

free-market  best-response competition, no tax
linear-sp    competition under the fixed linear bracket schedule
planner-sp   competition under a searched schedule
collusion    joint profit maximization (the profit normalizer)

A small search budget keeps this demo quick; raise population_size and
generations for a serious run.
"""

from fairmarket import (
    RegimeSpec,
    SearchSettings,
    SolverSettings,
    compare_regimes,
    load_bundled,
)
from fairmarket.scenarios import render_comparison

config, planner_config = load_bundled("insurance")

search = SearchSettings(population_size=16, generations=20)
regimes = [
    RegimeSpec("free-market"),
    RegimeSpec("linear-sp", planner_config=planner_config),
    RegimeSpec("planner-sp", planner_config=planner_config, search=search),
    RegimeSpec("collusion"),
]

report = compare_regimes(config, regimes, SolverSettings(), seeds=(0, 1))
print(render_comparison(report))
