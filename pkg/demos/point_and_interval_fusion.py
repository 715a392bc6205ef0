"""
Fusing point and interval estimates
===================================

A machine is either healthy (outcome 1) or faulty (outcome 2).  A prior and
three sensor readings give a posterior; three independent guesses of the same
state are combined directly.  The same data is then loosened to probability
intervals.
"""

import numpy as np

from credalfusion import (
    IntervalDistribution,
    LikelihoodMatrix,
    PointDistribution,
    fuse_context_specific_interval,
    fuse_context_specific_point,
    fuse_general_interval_a1,
    fuse_general_interval_a2,
    fuse_general_point,
    validate_interval_distribution,
)

np.set_printoptions(precision=4, suppress=True)

# Context-specific fusion: prior times the likelihood of each reading
prior = PointDistribution([0.9, 0.1])
lik = np.array([[0.1, 0.6], [0.3, 0.6], [0.7, 0.2]])
print("posterior from prior and readings:", fuse_context_specific_point(prior, lik).probs)

# General fusion: independent estimates of one value, multiplied and renormalised
guesses = [PointDistribution([0.45, 0.55]), PointDistribution([0.6, 0.4]), PointDistribution([0.1, 0.9])]
print("fused guesses:", fuse_general_point(guesses).probs)

# Interval versions: every number becomes a +-0.05 band
prior_iv = IntervalDistribution([0.85, 0.05], [0.95, 0.15])
print("prior interval valid:", validate_interval_distribution(prior_iv).ok)
lik_iv = LikelihoodMatrix(lik - 0.05, lik + 0.05)
post = fuse_context_specific_interval(prior_iv, lik_iv)
print("posterior lower:", post.lower, "upper:", post.upper)

guesses_iv = [IntervalDistribution(g.probs - 0.05, g.probs + 0.05) for g in guesses]
exact = fuse_general_interval_a1(guesses_iv)
fast = fuse_general_interval_a2(guesses_iv)
print("exact general fusion  lower:", exact.lower, "upper:", exact.upper)
print("closed-form fusion    lower:", fast.lower, "upper:", fast.upper)

# The exact result is never wider than the closed form
print("exact inside closed form:", bool(np.all(exact.lower >= fast.lower - 1e-9) and np.all(exact.upper <= fast.upper + 1e-9)))
