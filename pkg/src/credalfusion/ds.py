"""Fusion of Dempster-Shafer models read as credal sets.

Every algorithm here computes the posterior belief function ``Bel`` over all
nonempty subsets and converts it back to masses by Moebius inversion.
Dempster's rule is included as a baseline that does *not* contain every
pointwise-fused distribution.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from math import factorial
from typing import Mapping, Sequence

import numpy as np

from .core import (
    EPS,
    LikelihoodMatrix,
    MassFunction,
    PointDistribution,
    commonality_table,
    contains_point,
    full_mask,
    mass_from_belief,
    outcomes_of,
    search_limit,
    subset_sum,
)
from .errors import (
    ConflictError,
    InternalConsistencyError,
    InvalidModelError,
    NotBeliefFunctionError,
    SearchGuardError,
    StructureError,
)
from .point import fuse_general_point


class DegenerateFusionWarning(UserWarning):
    """Fusion produced a vacuous model for structural reasons (e.g. no singleton masses)."""


@dataclass(frozen=True, eq=False)
class ChoiceInstance:
    """Focus each row's masses onto single elements of ``A`` to optimise agreement.

    ``A`` is a tuple of distinct labels.  ``f[i]`` maps bitmasks over positions
    in ``A`` (bit ``k`` is ``A[k]``) to nonnegative weights; use
    :meth:`from_subsets` to key by label tuples instead.
    """

    A: tuple
    f: tuple
    sense: str = "max"

    def __post_init__(self):
        A = tuple(self.A)
        if len(A) < 1 or len(set(A)) != len(A):
            raise StructureError("A must hold m >= 1 distinct elements")
        if self.sense not in ("max", "min"):
            raise StructureError(f"sense must be 'max' or 'min', not {self.sense!r}")
        full = (1 << len(A)) - 1
        rows = []
        for fi in self.f:
            row = {}
            for mask, value in dict(fi).items():
                mask, value = int(mask), float(value)
                if mask <= 0 or mask > full:
                    raise StructureError(f"subset mask {mask} invalid for |A|={len(A)}")
                if value < 0 or not np.isfinite(value):
                    raise InvalidModelError("choice weights must be nonnegative", ["range"])
                if value > 0:
                    row[mask] = row.get(mask, 0.0) + value
            rows.append(row)
        if not rows:
            raise StructureError("need n >= 1 rows")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "f", tuple(rows))

    @classmethod
    def from_subsets(cls, A, f_rows, sense: str = "max") -> "ChoiceInstance":
        A = tuple(A)
        pos = {a: k for k, a in enumerate(A)}
        rows = []
        for fi in f_rows:
            row = {}
            for subset, value in (fi.items() if isinstance(fi, Mapping) else fi):
                mask = 0
                for a in subset:
                    if a not in pos:
                        raise StructureError(f"{a!r} is not in A")
                    mask |= 1 << pos[a]
                if mask == 0:
                    raise StructureError("subsets must be nonempty")
                row[mask] = row.get(mask, 0.0) + float(value)
            rows.append(row)
        return cls(A, tuple(rows), sense)

    @property
    def n(self) -> int:
        return len(self.f)

    @property
    def m(self) -> int:
        return len(self.A)

    def raw_size(self) -> float:
        """Number of choice-function tuples, ``prod_i prod_J |J|`` over positive weights."""
        total = 1.0
        for row in self.f:
            for mask in row:
                total *= bin(mask).count("1")
        return total


def _ordering_focusings(row: dict, m: int, limit: int):
    """Distinct focused vectors of one row, one per ordering of ``A``.

    Under ordering ``rho`` every weight goes to the earliest element of its
    subset.  These vectors are the vertices of the row's credal polytope, so a
    multilinear objective needs no other candidates.  Returns the distinct
    vectors and, for each, one ordering producing it.
    """
    if factorial(m) > limit:
        raise SearchGuardError("ordering enumeration refused", float(factorial(m)), limit)
    table = np.zeros(1 << m)
    for mask, value in row.items():
        table[mask] = value
    inside = subset_sum(table, m)
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64).reshape(-1, m)
    remaining = np.full(perms.shape[0], (1 << m) - 1, dtype=np.int64)
    x = np.zeros((perms.shape[0], m))
    rows_idx = np.arange(perms.shape[0])
    for k in range(m):
        e = perms[:, k]
        after = remaining & ~(1 << e)
        x[rows_idx, e] = inside[remaining] - inside[after]
        remaining = after
    _, first = np.unique(x, axis=0, return_index=True)
    first = np.sort(first)
    return x[first], perms[first]


def solve_choice_problem(inst: ChoiceInstance, limit: int | None = None):
    """Exact optimum of the mass-focusing sum of products.

    Returns ``(value, witness)`` where ``witness[i]`` maps each positive-weight
    subset (as a tuple of labels) to the element of ``A`` it was focused on.
    """
    limit = search_limit() if limit is None else limit
    m = inst.m
    # a row without weight forces every product to zero
    if any(not row for row in inst.f):
        witness = [{tuple(inst.A[k] for k in range(m) if mask >> k & 1): inst.A[(mask & -mask).bit_length() - 1]
                    for mask in row} for row in inst.f]
        return 0.0, witness
    cands = [_ordering_focusings(row, m, limit) for row in inst.f]
    size = float(np.prod([float(c[0].shape[0]) for c in cands]))
    if size > limit:
        raise SearchGuardError("choice-problem search refused", size, limit)
    best_val = None
    best = None
    maximize = inst.sense == "max"
    # vectorise the last row, iterate over the rest
    head = [c[0] for c in cands[:-1]]
    last = cands[-1][0]
    for idx in itertools.product(*[range(h.shape[0]) for h in head]):
        prefix = np.ones(m)
        for i, k in enumerate(idx):
            prefix = prefix * head[i][k]
        scores = last @ prefix
        k_last = int(np.argmax(scores) if maximize else np.argmin(scores))
        val = float(scores[k_last])
        if best_val is None or (val > best_val if maximize else val < best_val):
            best_val, best = val, idx + (k_last,)
    witness = []
    for i, k in enumerate(best):
        order = cands[i][1][k]
        rank = {int(e): r for r, e in enumerate(order)}
        g = {}
        for mask in inst.f[i]:
            members = [b for b in range(m) if mask >> b & 1]
            g[tuple(inst.A[b] for b in members)] = inst.A[min(members, key=rank.__getitem__)]
        witness.append(g)
    x = np.vstack([cands[i][0][k] for i, k in enumerate(best)])
    return float(np.prod(x, axis=0).sum()), witness


# ---------------------------------------------------------------------------
# context-specific fusion


def _argbest(values, members, maximize):
    """Member with the extreme value; ties go to the smallest index."""
    best = members[0]
    for j in members[1:]:
        if (values[j] > values[best]) if maximize else (values[j] < values[best]):
            best = j
    return best


def context_specific_ds_tables(prior: MassFunction, lik: LikelihoodMatrix):
    """Dense posterior ``Bel`` and ``Pl`` tables of context-specific DS fusion."""
    if lik.M != prior.M:
        raise StructureError(f"likelihoods cover M={lik.M} outcomes, prior covers {prior.M}")
    M = prior.M
    full = full_mask(M)
    l_prod = np.prod(lik.lower, axis=0)
    u_prod = np.prod(lik.upper, axis=0)
    focal = [(mask, [j for j in range(M) if mask >> j & 1], v) for mask, v in prior.masses.items()]
    if not any(u_prod[j] > 0 for _, members, _ in focal for j in members):
        raise ConflictError("no posterior support: every focal set has zero likelihood")
    bel = np.zeros(1 << M)
    pl = np.zeros(1 << M)
    in_set = np.zeros(M, dtype=bool)
    for target in range(1, full + 1):
        for j in range(M):
            in_set[j] = target >> j & 1
        for lower in (True, False):
            c = np.where(in_set, l_prod, u_prod) if lower else np.where(in_set, u_prod, l_prod)
            p = np.zeros(M)
            for mask, members, value in focal:
                if mask & ~target == 0:
                    j = _argbest(c, members, maximize=not lower)
                elif mask & target == 0:
                    j = _argbest(c, members, maximize=lower)
                elif lower:
                    j = _argbest(c, [k for k in members if not in_set[k]], maximize=True)
                else:
                    j = _argbest(c, [k for k in members if in_set[k]], maximize=True)
                p[j] += value
            weighted = p * c
            num = weighted[in_set].sum()
            rest = weighted[~in_set].sum()
            if lower and rest <= 0.0:
                val = 1.0
            elif num <= 0.0:
                val = 0.0
            else:
                val = num / (num + rest)
            (bel if lower else pl)[target] = val
    bel[full] = 1.0
    pl[full] = 1.0
    return bel, pl


def _masses_from(bel: np.ndarray, M: int, eps: float, what: str) -> MassFunction:
    try:
        return mass_from_belief(np.clip(bel, 0.0, 1.0), M, eps)
    except NotBeliefFunctionError as exc:
        raise InternalConsistencyError(f"{what} produced a non-belief-function posterior: {exc}") from exc


def fuse_context_specific_ds(prior: MassFunction, lik: LikelihoodMatrix, eps: float = EPS) -> MassFunction:
    """Posterior DS model of ``H`` given interval likelihoods."""
    bel, _ = context_specific_ds_tables(prior, lik)
    return _masses_from(bel, prior.M, eps, "context-specific DS fusion")


# ---------------------------------------------------------------------------
# general fusion


def _check_inputs(inputs: Sequence[MassFunction]) -> int:
    inputs = list(inputs)
    if len(inputs) < 2:
        raise StructureError("general fusion needs N >= 2 inputs")
    Ms = {m.M for m in inputs}
    if len(Ms) != 1:
        raise StructureError("all inputs must share M")
    return Ms.pop()


def _restricted(m: MassFunction, A: int) -> dict:
    """Masses of focal sets inside ``A``."""
    return {k: v for k, v in m.masses.items() if k & ~A == 0}


def _gravitated(m: MassFunction, A: int) -> dict:
    """Masses pulled into ``A``: each focal set is replaced by its intersection with ``A``."""
    out: dict[int, float] = {}
    for k, v in m.masses.items():
        if k & A:
            out[k & A] = out.get(k & A, 0.0) + v
    return out


def _local(row: dict, A: int) -> dict:
    """Re-key bitmasks over the outcomes of ``A`` to positions within ``A``."""
    positions = [j for j in range(A.bit_length()) if A >> j & 1]
    out = {}
    for mask, v in row.items():
        local = 0
        for k, j in enumerate(positions):
            if mask >> j & 1:
                local |= 1 << k
        out[local] = v
    return out


def _agreement(rows: list[dict], A: int, sense: str, limit) -> float:
    labels = outcomes_of(A)
    inst = ChoiceInstance(labels, tuple(_local(r, A) for r in rows), sense)
    value, _ = solve_choice_problem(inst, limit)
    return value


def general_ds_a1_belief(inputs: Sequence[MassFunction], limit: int | None = None) -> np.ndarray:
    """Dense posterior ``Bel`` of exact general DS fusion."""
    inputs = list(inputs)
    M = _check_inputs(inputs)
    full = full_mask(M)
    if _agreement([dict(m.masses) for m in inputs], full, "max", limit) <= 0.0:
        raise ConflictError("total conflict: the inputs can never agree")
    bel = np.zeros(1 << M)
    bel[full] = 1.0
    for target in range(1, full):
        rest = full ^ target
        r = _agreement([_gravitated(m, rest) for m in inputs], rest, "max", limit)
        if r <= 0.0:
            # agreement outside the target is impossible
            bel[target] = 1.0
            continue
        q = _agreement([_restricted(m, target) for m in inputs], target, "min", limit)
        if q > 0.0:
            bel[target] = q / (q + r)
    return bel


def fuse_general_ds_a1(
    inputs: Sequence[MassFunction], pairwise: bool = False, eps: float = EPS, limit: int | None = None
) -> MassFunction:
    """Maximally tight general DS fusion via the mass-focusing problem."""
    inputs = list(inputs)
    M = _check_inputs(inputs)
    if pairwise:
        current = inputs[0]
        for nxt in inputs[1:]:
            current = _masses_from(general_ds_a1_belief([current, nxt], limit), M, eps, "DS approach 1")
        return current
    return _masses_from(general_ds_a1_belief(inputs, limit), M, eps, "DS approach 1")


def general_ds_a2_tables(inputs: Sequence[MassFunction]):
    """Joint-model quantities and posterior ``Bel``/``Pl`` of closed-form DS fusion.

    Returns ``(bel, pl, joint_bel, joint_pl)`` as dense tables.
    """
    inputs = list(inputs)
    M = _check_inputs(inputs)
    full = full_mask(M)
    idx = np.arange(1 << M)
    singles = 1 << np.arange(M)

    agree = np.prod([m.table()[singles] for m in inputs], axis=0)
    joint_bel_single = np.zeros(1 << M)
    joint_bel_single[singles] = agree
    joint_bel = subset_sum(joint_bel_single, M)

    q = np.prod([commonality_table(m) for m in inputs], axis=0)
    sizes = np.zeros(1 << M, dtype=np.int64)
    for bit in range(M):
        sizes += (idx >> bit) & 1
    signed = np.where(sizes % 2 == 1, q, -q)
    signed[0] = 0.0
    joint_pl = subset_sum(signed, M)
    joint_pl[0] = 0.0

    if joint_pl[full] <= 0.0:
        raise ConflictError("total conflict: the inputs can never agree")

    comp = full ^ idx
    den_bel = joint_bel + joint_pl[comp]
    den_pl = joint_pl + joint_bel[comp]
    bel = np.divide(joint_bel, den_bel, out=np.zeros(1 << M), where=(joint_bel > 0) & (den_bel > 0))
    bel[joint_pl[comp] <= 0.0] = 1.0
    pl = np.divide(joint_pl, den_pl, out=np.zeros(1 << M), where=(joint_pl > 0) & (den_pl > 0))
    bel[0] = pl[0] = 0.0
    bel[full] = pl[full] = 1.0
    return np.clip(bel, 0.0, 1.0), np.clip(pl, 0.0, 1.0), joint_bel, joint_pl


def fuse_general_ds_a2(inputs: Sequence[MassFunction], eps: float = EPS) -> MassFunction:
    """Closed-form general DS fusion via a joint model that ignores independence.

    Without singleton masses common to all inputs the result is vacuous; a
    :class:`DegenerateFusionWarning` is issued in that case.
    """
    inputs = list(inputs)
    bel, _, joint_bel, _ = general_ds_a2_tables(inputs)
    M = inputs[0].M
    if joint_bel[full_mask(M)] <= 0.0:
        warnings.warn(
            "no outcome has singleton mass in every input; fused model is vacuous",
            DegenerateFusionWarning,
            stacklevel=2,
        )
    return _masses_from(bel, M, eps, "DS approach 2")


def dempster_combine(inputs: Sequence[MassFunction], eps: float = EPS) -> MassFunction:
    """Dempster's rule: conjunctive combination renormalised over nonempty intersections."""
    inputs = list(inputs)
    M = _check_inputs(inputs)
    acc: dict[int, float] = dict(inputs[0].masses)
    for m in inputs[1:]:
        nxt: dict[int, float] = {}
        for k1, v1 in acc.items():
            for k2, v2 in m.masses.items():
                k = k1 & k2
                nxt[k] = nxt.get(k, 0.0) + v1 * v2
        acc = nxt
    K = sum(v for k, v in acc.items() if k)
    if K <= 0.0:
        raise ConflictError("complete conflict: every combination of focal sets is disjoint")
    return MassFunction(M, {k: v / K for k, v in acc.items() if k}, eps=max(eps, 1e-9))


@dataclass
class ContainmentReport:
    """Result of fusing member points alongside their models."""

    fused_point: PointDistribution
    fused_model: MassFunction
    rule: str
    contained: bool

    @property
    def violation(self) -> bool:
        return not self.contained


_RULES = {
    "dempster": lambda inputs, eps: dempster_combine(inputs, eps),
    "a1": lambda inputs, eps: fuse_general_ds_a1(inputs, eps=eps),
    "a2": lambda inputs, eps: fuse_general_ds_a2(inputs, eps),
}


def containment_violation_report(
    inputs: Sequence[MassFunction], member_points: Sequence, rule: str = "dempster", eps: float = EPS
) -> ContainmentReport:
    """Fuse member points pointwise and check the fused DS model contains the result."""
    inputs = list(inputs)
    points = [p if isinstance(p, PointDistribution) else PointDistribution(p) for p in member_points]
    if len(points) != len(inputs):
        raise StructureError("need one member point per input model")
    for i, (m, p) in enumerate(zip(inputs, points)):
        if not contains_point(m, p, eps):
            raise InvalidModelError(f"member point {i + 1} is not inside its input model", ["membership"])
    if rule not in _RULES:
        raise StructureError(f"unknown rule {rule!r}; choose from {sorted(_RULES)}")
    fused_point = fuse_general_point(points, eps)
    fused_model = _RULES[rule](inputs, eps)
    return ContainmentReport(fused_point, fused_model, rule, contains_point(fused_model, fused_point, eps))

