"""Wall-clock cost of best-response rounds as the firm count grows.

Each trial times a fixed number of synchronous price rounds on a
synthetic market built by cycling the credit calibration's firms.
Round cost should grow roughly linearly with the number of firms.
"""

import numpy as np

from fairmarket import runtime_benchmark

rows = runtime_benchmark([2, 10, 20, 40], rounds_per_trial=5, seeds=(0, 1))

print(f"{'firms':>6} {'mean (s)':>10} {'std (s)':>10}")
for row in rows:
    print(f"{row.firms:>6} {row.mean_seconds:>10.3f} {row.std_seconds:>10.3f}")

firms = np.array([r.firms for r in rows], dtype=float)
times = np.array([r.mean_seconds for r in rows])
slope, intercept = np.polyfit(firms, times, 1)
fitted = slope * firms + intercept
r2 = 1.0 - ((times - fitted) ** 2).sum() / ((times - times.mean()) ** 2).sum()
print(f"\nlinear fit: {slope * 1000:.2f} ms per extra firm, R^2 = {r2:.4f}")
