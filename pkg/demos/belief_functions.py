"""
Belief functions and their fusion
=================================

Mass functions spread probability over sets of outcomes.  Belief and
plausibility give the lower and upper probability of every event, and the
Moebius transform recovers the masses from the belief values.
"""

import numpy as np

from credalfusion import (
    IntervalDistribution,
    LikelihoodMatrix,
    MassFunction,
    belief_of,
    ds_to_interval,
    fuse_context_specific_ds,
    fuse_general_ds_a1,
    fuse_general_ds_a2,
    interval_to_ds,
    mass_from_belief,
    plausibility_of,
)

np.set_printoptions(precision=4, suppress=True)


def show(label, m):
    parts = ", ".join(f"{set(s)}: {v:.4f}" for s, v in ((s, m.mass(s)) for s in m.focal_sets()))
    print(f"{label}: {parts}")


# 0.1 of the mass is uncommitted between the two outcomes
prior = MassFunction.from_subsets({(1,): 0.85, (2,): 0.05, (1, 2): 0.1}, 2)
show("prior", prior)
print("Bel({1}) =", belief_of(prior, (1,)), " Pl({1}) =", plausibility_of(prior, (1,)))

# Masses are recovered from the belief table
show("from beliefs", mass_from_belief(prior.belief_table(), 2))

# Posterior given interval likelihoods of three readings
lik = LikelihoodMatrix(
    [[0.05, 0.55], [0.25, 0.55], [0.65, 0.15]],
    [[0.15, 0.65], [0.35, 0.65], [0.75, 0.25]],
)
show("posterior", fuse_context_specific_ds(prior, lik))

# Three uncertain guesses of the same state
guesses = [
    MassFunction.from_subsets({(1,): 0.40, (2,): 0.50, (1, 2): 0.10}, 2),
    MassFunction.from_subsets({(1,): 0.55, (2,): 0.35, (1, 2): 0.10}, 2),
    MassFunction.from_subsets({(1,): 0.05, (2,): 0.85, (1, 2): 0.10}, 2),
]
show("exact fusion", fuse_general_ds_a1(guesses))
show("closed-form fusion", fuse_general_ds_a2(guesses))

# On two outcomes a mass function and an interval distribution are the same thing
iv = ds_to_interval(prior)
print("as intervals:", iv.lower, iv.upper)
show("and back", interval_to_ds(IntervalDistribution(iv.lower, iv.upper)))
