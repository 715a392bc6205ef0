"""Credal set types: point distributions, probability intervals and mass functions.

Outcomes are labelled ``1..M`` wherever a user names them (subset literals,
JSON files).  Internally a subset of outcomes is an ``int`` bitmask in which
bit ``j - 1`` stands for outcome ``j``; numpy arrays are 0-indexed as usual.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import comb
from types import MappingProxyType
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import (
    EmptyCredalSetError,
    InvalidModelError,
    NotBeliefFunctionError,
    SearchGuardError,
    StructureError,
)

EPS = 1e-9

#: Largest outcome count accepted by mass functions (tables have 2**M entries).
MAX_OUTCOMES = 24

DEFAULT_SEARCH_LIMIT = 10**7


def search_limit(default: int = DEFAULT_SEARCH_LIMIT) -> int:
    """Enumeration cap for exhaustive solvers; ``FUSE_MAX_SEARCH`` overrides it."""
    raw = os.environ.get("FUSE_MAX_SEARCH")
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise StructureError(f"FUSE_MAX_SEARCH must be an integer, got {raw!r}") from None
    if value < 1:
        raise StructureError("FUSE_MAX_SEARCH must be positive")
    return value


# ---------------------------------------------------------------------------
# subset bitmasks


def full_mask(M: int) -> int:
    return (1 << M) - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(outcomes: Iterable[int], M: int | None = None) -> int:
    """Bitmask of a collection of 1-based outcome labels."""
    mask = 0
    for j in outcomes:
        j = int(j)
        if j < 1 or (M is not None and j > M):
            raise StructureError(f"outcome {j} outside 1..{M if M is not None else 'M'}")
        mask |= 1 << (j - 1)
    if mask == 0:
        raise StructureError("subset must be nonempty")
    return mask


def outcomes_of(mask: int) -> tuple[int, ...]:
    """Sorted 1-based outcome labels in ``mask``."""
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def _as_mask(J, M: int) -> int:
    if isinstance(J, (int, np.integer)):
        J = int(J)
        if J <= 0 or J > full_mask(M):
            raise StructureError(f"subset mask {J} invalid for M={M}")
        return J
    return mask_of(J, M)


def _popcounts(M: int) -> np.ndarray:
    idx = np.arange(1 << M)
    counts = np.zeros(1 << M, dtype=np.int64)
    for bit in range(M):
        counts += (idx >> bit) & 1
    return counts


def subset_sum(table: np.ndarray, M: int) -> np.ndarray:
    """Zeta transform over subsets: ``out[A] = sum(table[B] for B subset of A)``."""
    out = np.array(table, dtype=float, copy=True)
    idx = np.arange(1 << M)
    for bit in range(M):
        sel = idx[(idx >> bit) & 1 == 1]
        out[sel] += out[sel ^ (1 << bit)]
    return out


def superset_sum(table: np.ndarray, M: int) -> np.ndarray:
    """Zeta transform over supersets: ``out[A] = sum(table[B] for B superset of A)``."""
    out = np.array(table, dtype=float, copy=True)
    idx = np.arange(1 << M)
    for bit in range(M):
        sel = idx[(idx >> bit) & 1 == 0]
        out[sel] += out[sel | (1 << bit)]
    return out


def moebius_inverse(table: np.ndarray, M: int) -> np.ndarray:
    """Inverse of :func:`subset_sum`.

    Equivalent to ``m(A) = sum((-1)**(|A|-|B|) * table[B] for B subset of A)``
    but done one bit at a time in O(M 2**M).
    """
    out = np.array(table, dtype=float, copy=True)
    idx = np.arange(1 << M)
    for bit in range(M):
        sel = idx[(idx >> bit) & 1 == 1]
        out[sel] -= out[sel ^ (1 << bit)]
    return out


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, eq=False)
class PointDistribution:
    """A single probability vector over outcomes ``1..M``."""

    probs: np.ndarray
    eps: float = EPS

    def __post_init__(self):
        p = _readonly(self.probs)
        if p.ndim != 1 or p.size < 2:
            raise StructureError("a point distribution needs a 1-D vector with M >= 2 entries")
        if np.any(~np.isfinite(p)) or np.any(p < -self.eps) or np.any(p > 1 + self.eps):
            raise InvalidModelError("probabilities must lie in [0, 1]", ["range"])
        if abs(p.sum() - 1.0) > self.eps:
            raise InvalidModelError(f"probabilities sum to {p.sum():.12g}, not 1", ["mass"])
        object.__setattr__(self, "probs", p)

    @property
    def M(self) -> int:
        return self.probs.size

    def __repr__(self):
        return f"PointDistribution({np.array2string(self.probs, precision=6)})"


@dataclass
class ValidityReport:
    """Outcome of :func:`validate_interval_distribution`.

    ``violations`` holds ``(family, detail)`` pairs where family is one of
    ``"range"``, ``"mass"`` or ``"reachability"``.
    """

    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def families(self) -> set:
        return {family for family, _ in self.violations}

    def __str__(self):
        if self.ok:
            return "ok"
        return "; ".join(f"{fam}: {detail}" for fam, detail in self.violations)


@dataclass(frozen=True, eq=False)
class IntervalDistribution:
    """Closed intervals ``[lower[j], upper[j]]`` on each outcome probability.

    Construction checks only shapes; call :meth:`validate` (or
    :func:`tighten_interval_distribution`) for the probabilistic conditions.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, up = _readonly(self.lower), _readonly(self.upper)
        if lo.ndim != 1 or up.ndim != 1 or lo.shape != up.shape:
            raise StructureError("lower and upper must be 1-D vectors of equal length")
        if lo.size < 2:
            raise StructureError("need M >= 2 outcomes")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(up))):
            raise StructureError("bounds must be finite")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def M(self) -> int:
        return self.lower.size

    @classmethod
    def from_point(cls, p) -> "IntervalDistribution":
        p = p.probs if isinstance(p, PointDistribution) else np.asarray(p, dtype=float)
        return cls(p, p)

    def validate(self, eps: float = EPS) -> ValidityReport:
        return validate_interval_distribution(self, eps)

    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def __repr__(self):
        pairs = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in zip(self.lower, self.upper))
        return f"IntervalDistribution({pairs})"


SubsetLike = Union[int, Iterable[int]]


@dataclass(frozen=True, eq=False)
class MassFunction:
    """Dempster-Shafer mass function on the nonempty subsets of ``1..M``.

    ``masses`` maps bitmasks to positive reals; absent subsets carry zero mass.
    Use :meth:`from_subsets` to build one from outcome-label tuples.
    """

    M: int
    masses: Mapping[int, float]
    eps: float = EPS

    def __post_init__(self):
        M = int(self.M)
        if M < 2:
            raise StructureError("need M >= 2 outcomes")
        if M > MAX_OUTCOMES:
            raise StructureError(f"M={M} exceeds the subset-table cap of {MAX_OUTCOMES}")
        full = full_mask(M)
        clean = {}
        for mask, value in dict(self.masses).items():
            mask, value = int(mask), float(value)
            if mask <= 0 or mask > full:
                raise StructureError(f"subset mask {mask} invalid for M={M}")
            if not np.isfinite(value) or value < -self.eps:
                raise InvalidModelError(f"mass {value} on {outcomes_of(mask)} is negative", ["range"])
            if value > 0.0:
                clean[mask] = clean.get(mask, 0.0) + value
        total = sum(clean.values())
        if abs(total - 1.0) > self.eps:
            raise InvalidModelError(f"masses sum to {total:.12g}, not 1", ["mass"])
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "masses", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def from_subsets(cls, items, M: int, eps: float = EPS) -> "MassFunction":
        """Build from ``{(1,): 0.85, (1, 2): 0.1, ...}`` or an iterable of pairs."""
        if isinstance(items, Mapping):
            items = items.items()
        masses: dict[int, float] = {}
        for subset, value in items:
            mask = _as_mask(subset, M)
            masses[mask] = masses.get(mask, 0.0) + float(value)
        return cls(M, masses, eps)

    @classmethod
    def from_table(cls, table, M: int, eps: float = EPS) -> "MassFunction":
        """Build from a dense length-``2**M`` array (entry 0 must be zero)."""
        table = np.asarray(table, dtype=float)
        if table.shape != (1 << M,):
            raise StructureError(f"mass table must have {1 << M} entries")
        if abs(table[0]) > eps:
            raise InvalidModelError("the empty set cannot carry mass", ["range"])
        return cls(M, {k: table[k] for k in np.flatnonzero(table) if k != 0}, eps)

    @classmethod
    def vacuous(cls, M: int) -> "MassFunction":
        return cls(M, {full_mask(M): 1.0})

    @classmethod
    def from_point(cls, p) -> "MassFunction":
        probs = p.probs if isinstance(p, PointDistribution) else np.asarray(p, dtype=float)
        return cls(probs.size, {1 << j: v for j, v in enumerate(probs)})

    def table(self) -> np.ndarray:
        t = np.zeros(1 << self.M)
        for mask, value in self.masses.items():
            t[mask] = value
        return t

    def belief_table(self) -> np.ndarray:
        return belief_table(self)

    def plausibility_table(self) -> np.ndarray:
        return plausibility_table(self)

    def focal_sets(self) -> list[tuple[int, ...]]:
        return [outcomes_of(mask) for mask in self.masses]

    def mass(self, J: SubsetLike) -> float:
        return self.masses.get(_as_mask(J, self.M), 0.0)

    def __repr__(self):
        body = ", ".join(f"{set(outcomes_of(k))}: {v:.6g}" for k, v in self.masses.items())
        return f"MassFunction(M={self.M}, {{{body}}})"


@dataclass(frozen=True, eq=False)
class LikelihoodMatrix:
    """``N x M`` intervals bounding ``Pr(O_i = o_i | H = j)``.

    Rows are conditioned on the observed value already and need not sum to
    anything.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, up = _readonly(self.lower), _readonly(self.upper)
        if lo.ndim == 1:
            lo, up = _readonly(lo[None, :]), _readonly(up[None, :])
        if lo.ndim != 2 or lo.shape != up.shape:
            raise StructureError("likelihood bounds must be N x M arrays of equal shape")
        if lo.shape[0] < 1 or lo.shape[1] < 2:
            raise StructureError("need N >= 1 observations and M >= 2 outcomes")
        if np.any(lo < 0) or np.any(up > 1) or np.any(lo > up) or not np.all(np.isfinite(lo + up)):
            raise InvalidModelError("likelihood intervals must satisfy 0 <= l <= u <= 1", ["range"])
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @classmethod
    def from_points(cls, values) -> "LikelihoodMatrix":
        values = np.atleast_2d(np.asarray(values, dtype=float))
        return cls(values, values)

    @property
    def N(self) -> int:
        return self.lower.shape[0]

    @property
    def M(self) -> int:
        return self.lower.shape[1]


# ---------------------------------------------------------------------------
# probability intervals


def validate_interval_distribution(d: IntervalDistribution, eps: float = EPS) -> ValidityReport:
    """Check range, mass feasibility and reachability of the bounds separately."""
    lo, up = d.lower, d.upper
    report = ValidityReport()
    for j in range(d.M):
        if not (-eps <= lo[j] <= up[j] + eps and up[j] <= 1 + eps):
            report.violations.append(("range", f"outcome {j + 1}: need 0 <= {lo[j]:.6g} <= {up[j]:.6g} <= 1"))
    s_lo, s_up = lo.sum(), up.sum()
    if s_lo > 1 + eps:
        report.violations.append(("mass", f"lower bounds sum to {s_lo:.6g} > 1"))
    if s_up < 1 - eps:
        report.violations.append(("mass", f"upper bounds sum to {s_up:.6g} < 1"))
    for j in range(d.M):
        floor = 1.0 - (s_up - up[j])
        ceil = 1.0 - (s_lo - lo[j])
        if lo[j] < floor - eps:
            report.violations.append(
                ("reachability", f"outcome {j + 1}: lower {lo[j]:.6g} < 1 - sum(other uppers) = {floor:.6g}")
            )
        if up[j] > ceil + eps:
            report.violations.append(
                ("reachability", f"outcome {j + 1}: upper {up[j]:.6g} > 1 - sum(other lowers) = {ceil:.6g}")
            )
    return report


def require_valid_interval(d: IntervalDistribution, eps: float = EPS) -> IntervalDistribution:
    report = validate_interval_distribution(d, eps)
    if not report.ok:
        raise InvalidModelError(f"invalid probability interval distribution: {report}", report.violations)
    return d


def reachable_bounds(d: IntervalDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Bounds of ``d`` cut back to what sum-to-one points can actually reach.

    Validation accepts bounds that are off by up to ``eps``; algorithms work
    on these exact values so that tolerance slack never turns into
    probability mass.
    """
    lo, up = d.lower, d.upper
    new_lo = np.clip(np.maximum(lo, 1.0 - (up.sum() - up)), 0.0, 1.0)
    new_up = np.clip(np.minimum(up, 1.0 - (lo.sum() - lo)), 0.0, 1.0)
    return new_lo, np.maximum(new_up, new_lo)


def tighten_interval_distribution(lower, upper=None, eps: float = EPS) -> IntervalDistribution:
    """Shrink raw bounds to reachable ones without changing the member set.

    Accepts either an :class:`IntervalDistribution` or two bound vectors.
    """
    if isinstance(lower, IntervalDistribution):
        lo, up = lower.lower.copy(), lower.upper.copy()
    else:
        lo, up = np.asarray(lower, dtype=float).copy(), np.asarray(upper, dtype=float).copy()
    IntervalDistribution(lo, up)  # shape checks
    if np.any(lo < -eps) or np.any(up > 1 + eps) or np.any(lo > up + eps):
        raise InvalidModelError("bounds must satisfy 0 <= l <= u <= 1", ["range"])
    lo, up = np.clip(lo, 0.0, 1.0), np.clip(up, 0.0, 1.0)
    up = np.maximum(up, lo)
    current = IntervalDistribution(lo, up)
    if validate_interval_distribution(current, eps).ok:
        return current
    s_lo, s_up = lo.sum(), up.sum()
    if s_lo > 1 + eps or s_up < 1 - eps:
        raise EmptyCredalSetError("empty credal set", ["mass"])
    new_lo = np.maximum(lo, 1.0 - (s_up - up))
    new_up = np.minimum(up, 1.0 - (s_lo - lo))
    if new_lo.sum() > 1 + eps or new_up.sum() < 1 - eps or np.any(new_lo > new_up + eps):
        raise EmptyCredalSetError("empty credal set", ["mass"])
    new_up = np.maximum(new_up, new_lo)
    return IntervalDistribution(new_lo, new_up)


def interval_extreme_points(d: IntervalDistribution, eps: float = EPS, max_outcomes: int = 10) -> list[np.ndarray]:
    """Vertices of ``{p : lower <= p <= upper, sum(p) = 1}``.

    For each ordering of the outcomes, start from the lower bounds and raise
    probabilities to their upper bounds in that order until the total reaches
    one.  Orderings that raise the same set before saturating lead to the same
    state, so the search walks raised *sets* and never repeats one.
    """
    if d.M > max_outcomes:
        raise SearchGuardError(
            f"extreme-point enumeration refused for M={d.M} > {max_outcomes}",
            float(np.prod(np.arange(1, d.M + 1, dtype=float))),
            float(np.prod(np.arange(1, max_outcomes + 1, dtype=float))),
        )
    require_valid_interval(d, eps)
    lo, up = d.lower, d.upper
    M = d.M
    points: list[np.ndarray] = []

    def emit(p):
        for q in points:
            if np.all(np.abs(q - p) <= eps):
                return
        points.append(p)

    base = lo.sum()
    if base >= 1 - eps:
        emit(lo.copy())
        return points
    seen = set()
    stack = [0]
    while stack:
        raised = stack.pop()
        if raised in seen:
            continue
        seen.add(raised)
        total = base + sum(up[j] - lo[j] for j in range(M) if raised >> j & 1)
        for j in range(M):
            if raised >> j & 1:
                continue
            step = up[j] - lo[j]
            if total + step >= 1 - eps:
                p = lo.copy()
                for k in range(M):
                    if raised >> k & 1:
                        p[k] = up[k]
                p[j] = lo[j] + (1.0 - total)
                emit(p)
            else:
                stack.append(raised | (1 << j))
    return points


def extreme_point_count_formula(M: int) -> int:
    """Vertex count of ``[0, 2/M]`` intervals for even ``M``: ``C(M, M/2)``."""
    if M % 2:
        raise StructureError("formula holds for even M only")
    return comb(M, M // 2)


# ---------------------------------------------------------------------------
# belief / plausibility / masses


def belief_table(m: MassFunction) -> np.ndarray:
    """Dense ``Bel`` over all bitmasks (entry 0 is 0)."""
    return subset_sum(m.table(), m.M)


def plausibility_table(m: MassFunction) -> np.ndarray:
    """Dense ``Pl`` over all bitmasks, computed as ``1 - Bel(complement)``."""
    bel = belief_table(m)
    full = full_mask(m.M)
    idx = np.arange(1 << m.M)
    pl = 1.0 - bel[full ^ idx]
    pl[0] = 0.0
    return pl


def commonality_table(m: MassFunction) -> np.ndarray:
    """Dense ``q(A) = sum of m(B) for B superset of A``."""
    return superset_sum(m.table(), m.M)


def belief_of(m: MassFunction, J: SubsetLike) -> float:
    """Total mass of focal sets inside ``J``."""
    mask = _as_mask(J, m.M)
    return float(sum(v for k, v in m.masses.items() if k & ~mask == 0))


def plausibility_of(m: MassFunction, J: SubsetLike) -> float:
    """Total mass of focal sets meeting ``J``."""
    mask = _as_mask(J, m.M)
    return float(sum(v for k, v in m.masses.items() if k & mask))


def mass_from_belief(bel, M: int | None = None, eps: float = EPS) -> MassFunction:
    """Recover masses from a belief function by Moebius inversion.

    ``bel`` is either a dense length-``2**M`` table or a mapping from subsets
    (bitmasks or outcome tuples) to belief values; missing subsets count as 0.
    Masses in ``[-eps, 0)`` are floating-point noise: they are clamped and the
    rest renormalized.  Anything lower raises :class:`NotBeliefFunctionError`.
    """
    if isinstance(bel, Mapping):
        if M is None:
            raise StructureError("M is required when beliefs are given as a mapping")
        table = np.zeros(1 << M)
        for subset, value in bel.items():
            table[_as_mask(subset, M)] = float(value)
    else:
        table = np.asarray(bel, dtype=float)
        if M is None:
            M = int(table.size).bit_length() - 1
        if table.shape != (1 << M,):
            raise StructureError(f"belief table must have {1 << M} entries")
        table = table.copy()
    table[0] = 0.0
    if abs(table[full_mask(M)] - 1.0) > eps:
        raise NotBeliefFunctionError(f"Bel(Val) = {table[full_mask(M)]:.12g}, not 1", ["mass"])
    masses = moebius_inverse(table, M)
    masses[0] = 0.0
    worst = int(np.argmin(masses))
    if masses[worst] < -eps:
        raise NotBeliefFunctionError(
            f"not a belief function: Moebius mass {masses[worst]:.3g} on {set(outcomes_of(worst))}",
            ["range"],
        )
    masses = np.where(masses < 0.0, 0.0, masses)
    masses /= masses.sum()
    return MassFunction.from_table(masses, M, eps=max(eps, 1e-9))


# ---------------------------------------------------------------------------
# membership and conversions


def _probs(p) -> np.ndarray:
    return p.probs if isinstance(p, PointDistribution) else np.asarray(p, dtype=float)


def contains_point(model, p, eps: float = EPS) -> bool:
    """Whether distribution ``p`` belongs to the credal set ``model``."""
    probs = _probs(p)
    if isinstance(model, IntervalDistribution):
        if probs.shape != (model.M,):
            raise StructureError(f"point has {probs.size} entries, model has M={model.M}")
        return bool(np.all(model.lower - eps <= probs) and np.all(probs <= model.upper + eps))
    if isinstance(model, MassFunction):
        if probs.shape != (model.M,):
            raise StructureError(f"point has {probs.size} entries, model has M={model.M}")
        bel = belief_table(model)
        pl = plausibility_table(model)
        singletons = np.zeros(1 << model.M)
        singletons[1 << np.arange(model.M)] = probs
        totals = subset_sum(singletons, model.M)
        return bool(np.all(bel[1:] - eps <= totals[1:]) and np.all(totals[1:] <= pl[1:] + eps))
    if isinstance(model, PointDistribution):
        return bool(np.all(np.abs(model.probs - probs) <= eps))
    raise TypeError(f"unsupported model type {type(model).__name__}")


def ds_to_interval(m: MassFunction, eps: float = EPS) -> IntervalDistribution:
    """Outer interval approximation: ``[Bel({j}), Pl({j})]`` per outcome, tightened."""
    singles = 1 << np.arange(m.M)
    return tighten_interval_distribution(belief_table(m)[singles], plausibility_table(m)[singles], eps)


def interval_lower_probability(d: IntervalDistribution) -> np.ndarray:
    """Dense lower envelope ``max(sum l over A, 1 - sum u outside A)`` of an interval set."""
    M = d.M
    lo = np.zeros(1 << M)
    up = np.zeros(1 << M)
    lo[1 << np.arange(M)] = d.lower
    up[1 << np.arange(M)] = d.upper
    sum_lo = subset_sum(lo, M)
    sum_up = subset_sum(up, M)
    full = full_mask(M)
    idx = np.arange(1 << M)
    env = np.maximum(sum_lo, 1.0 - sum_up[full ^ idx])
    env[0] = 0.0
    env[full] = 1.0
    return env


def interval_to_ds(d: IntervalDistribution, eps: float = EPS) -> MassFunction:
    """Mass function with the same credal set as ``d``.

    Raises :class:`NotBeliefFunctionError` when the interval's lower envelope is
    not a belief function (possible for M >= 4).
    """
    require_valid_interval(d, eps)
    return mass_from_belief(interval_lower_probability(d), d.M, eps)
