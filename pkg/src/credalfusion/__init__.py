"""Fusion of credal sets.

Point distributions, probability interval distributions and Dempster-Shafer
mass functions can be fused in two modes: *context-specific* (a prior plus
observation likelihoods) and *general* (several estimates of one common
value).  Brute-force oracles in :mod:`credalfusion.oracle` check the results.
"""

from .core import (
    EPS,
    IntervalDistribution,
    LikelihoodMatrix,
    MassFunction,
    PointDistribution,
    ValidityReport,
    belief_of,
    belief_table,
    commonality_table,
    contains_point,
    ds_to_interval,
    extreme_point_count_formula,
    interval_extreme_points,
    interval_to_ds,
    mask_of,
    mass_from_belief,
    outcomes_of,
    plausibility_of,
    plausibility_table,
    reachable_bounds,
    search_limit,
    tighten_interval_distribution,
    validate_interval_distribution,
)
from .ds import (
    ChoiceInstance,
    DegenerateFusionWarning,
    containment_violation_report,
    dempster_combine,
    fuse_context_specific_ds,
    fuse_general_ds_a1,
    fuse_general_ds_a2,
    solve_choice_problem,
)
from .errors import (
    ConflictError,
    CredalError,
    EmptyCredalSetError,
    InternalConsistencyError,
    InvalidModelError,
    NotBeliefFunctionError,
    ParseError,
    SearchGuardError,
    StructureError,
)
from .interval import (
    CornerAssignment,
    SumOfProductsInstance,
    fuse_context_specific_interval,
    fuse_general_interval_a1,
    fuse_general_interval_a2,
    solve_sum_of_products,
)
from .oracle import (
    FUSION_OPS,
    OracleBounds,
    check_containment,
    oracle_ds_bounds,
    oracle_interval_bounds,
    sample_member_point,
)
from .point import fuse_context_specific_point, fuse_general_point, fuse_sequential_point
from .sat import SatInstance, brute_force_sat, decide_sat_via_sop, reduce_sat_to_sop, solve_sat_via_sop

__version__ = "0.1.0"
