"""
Counting corners of credal sets
===============================

A probability interval distribution is a polytope.  With every outcome in
[0, 2/M] its corners put 2/M on half of the outcomes, so the count is the
central binomial coefficient and grows fast.
"""

import math

import numpy as np

from credalfusion import IntervalDistribution, MassFunction, extreme_point_count_formula, interval_extreme_points
from credalfusion.core import full_mask

for M in (2, 4, 6, 8):
    d = IntervalDistribution(np.zeros(M), np.full(M, 2.0 / M))
    print(f"M={M}: {len(interval_extreme_points(d))} corners, formula {extreme_point_count_formula(M)}")
print("M=20 by formula:", extreme_point_count_formula(20), "=", math.comb(20, 10))

# Mass 1/7 on every nonempty subset of three outcomes: each ordering of the
# outcomes gives one corner, a permutation of (4/7, 2/7, 1/7)
m = MassFunction(3, {k: 1 / 7 for k in range(1, full_mask(3) + 1)})
bel = m.belief_table()
for order in [(0, 1, 2), (2, 1, 0)]:
    p, mask, prev = np.zeros(3), 0, 0.0
    for j in order:
        mask |= 1 << j
        p[j], prev = bel[mask] - prev, bel[mask]
    print("ordering", [j + 1 for j in order], "->", (p * 7).round(6), "/ 7")
