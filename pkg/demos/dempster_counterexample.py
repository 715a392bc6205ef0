"""
Why Dempster's rule is not a safe fusion rule
=============================================

Two sources each put 0.8 of their mass on "don't know".  Pick the member
distribution (0.1, 0.9) from each and fuse the two points: the result
(0.0122, 0.9878) lies outside what Dempster's rule reports, while the
containment-preserving closed form keeps it.
"""

from credalfusion import MassFunction, containment_violation_report, dempster_combine

source = MassFunction.from_subsets({(1,): 0.1, (2,): 0.1, (1, 2): 0.8}, 2)
inputs = [source, source]
post = dempster_combine(inputs)
print("Dempster masses:", {s: round(post.mass(s), 4) for s in post.focal_sets()})

for rule in ("dempster", "a2"):
    report = containment_violation_report(inputs, [[0.1, 0.9], [0.1, 0.9]], rule=rule)
    fused = report.fused_point.probs.round(4)
    print(f"{rule:>8}: fused member point {fused}, contained: {not report.violation}")
