"""
Checking fusion against brute force
===================================

The fused credal set must contain every fused member point.  The randomized
check samples member points, and the oracle enumerates vertices to find the
tightest possible bounds on small problems.
"""

import numpy as np

from credalfusion import (
    IntervalDistribution,
    check_containment,
    fuse_general_interval_a1,
    fuse_general_interval_a2,
    oracle_interval_bounds,
)
from credalfusion.errors import SearchGuardError

np.set_printoptions(precision=6, suppress=True)
rng = np.random.default_rng(7)

inputs = []
for _ in range(3):
    p = rng.dirichlet(np.ones(3))
    inputs.append(IntervalDistribution(np.clip(p - 0.1, 0, 1), np.clip(p + 0.1, 0, 1)))

for op in ("interval-a1", "interval-a2"):
    print(check_containment(op, inputs, trials=500, seed=0).summary())

o = oracle_interval_bounds("general", inputs)
a1, a2 = fuse_general_interval_a1(inputs), fuse_general_interval_a2(inputs)
print("oracle lower:", o.lower, "from", o.corner_count, "configurations")
print("exact lower: ", a1.lower, " gap", np.abs(a1.lower - o.lower).max())
print("closed lower:", a2.lower)

# The oracle refuses problems that are too big to enumerate
big = [IntervalDistribution(np.zeros(8), np.full(8, 0.25)) for _ in range(8)]
try:
    oracle_interval_bounds("general", big)
except SearchGuardError as exc:
    print("oracle refused:", exc)
