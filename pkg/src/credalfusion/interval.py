"""Fusion of probability interval distributions.

Context-specific fusion uses a greedy allocation of prior mass.  General
fusion comes in two flavours: an exact one built on the "optimum sum of
products" problem (solved by exhaustive corner search), and an O(NM) closed
form that is cheaper but looser.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    EPS,
    IntervalDistribution,
    LikelihoodMatrix,
    reachable_bounds,
    require_valid_interval,
    search_limit,
    tighten_interval_distribution,
)
from .errors import ConflictError, InvalidModelError, SearchGuardError, StructureError

# Block sizes for the vectorised corner search; they bound memory, not results.
_TAIL_CAP = 1 << 15
_BLOCK_CELLS = 1 << 22


@dataclass(frozen=True, eq=False)
class SumOfProductsInstance:
    """Optimise ``sum_j prod_i x[i, j]`` subject to ``a <= x <= b`` and row sums ``c``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    sense: str = "max"
    eps: float = EPS

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.atleast_2d(np.asarray(self.b, dtype=float))
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        if a.shape != b.shape or c.shape != (a.shape[0],):
            raise StructureError("a and b must be n x m and c must have n entries")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise StructureError("need n >= 1 rows and m >= 1 columns")
        if self.sense not in ("max", "min"):
            raise StructureError(f"sense must be 'max' or 'min', not {self.sense!r}")
        tol = self.eps * max(1, a.shape[1])
        if np.any(a < -tol) or np.any(a > b + tol):
            raise InvalidModelError("need 0 <= a <= b", ["range"])
        if np.any(a.sum(axis=1) > c + tol) or np.any(c > b.sum(axis=1) + tol):
            raise InvalidModelError("infeasible instance: need sum(a_i) <= c_i <= sum(b_i)", ["mass"])
        for name, arr in (("a", a), ("b", b), ("c", c)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def _unchecked(cls, a, b, c, sense: str = "max", eps: float = EPS) -> "SumOfProductsInstance":
        # used by reductions whose output may legitimately be infeasible
        inst = object.__new__(cls)
        for name, val in (("a", a), ("b", b), ("c", c)):
            arr = np.array(val, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(inst, name, arr)
        object.__setattr__(inst, "sense", sense)
        object.__setattr__(inst, "eps", eps)
        return inst

    @property
    def feasible(self) -> bool:
        tol = self.eps * max(1, self.m)
        return bool(np.all(self.a.sum(axis=1) <= self.c + tol) and np.all(self.c <= self.b.sum(axis=1) + tol))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.a.shape[1]

    def objective(self, x) -> float:
        return float(np.prod(np.asarray(x, dtype=float), axis=0).sum())


@dataclass(frozen=True, eq=False)
class CornerAssignment:
    """Optimiser state where each row sits on its bounds except at most one entry."""

    x: np.ndarray

    def is_corner(self, inst: SumOfProductsInstance, tol: float = 1e-9) -> bool:
        x = self.x
        if x.shape != inst.a.shape:
            return False
        if np.any(x < inst.a - tol) or np.any(x > inst.b + tol):
            return False
        if np.any(np.abs(x.sum(axis=1) - inst.c) > tol * max(1, inst.m)):
            return False
        off = ~(np.isclose(x, inst.a, rtol=0, atol=tol) | np.isclose(x, inst.b, rtol=0, atol=tol))
        return bool(np.all(off.sum(axis=1) <= 1))


def row_corners(a_row, b_row, c, eps: float = EPS, limit: int | None = None) -> np.ndarray:
    """Distinct feasible corners of ``{a <= x <= b, sum(x) = c}``.

    A corner fixes every coordinate but one at ``a`` or ``b``; the free
    coordinate absorbs the rest of ``c`` and must stay inside its own bounds.
    """
    a_row = np.asarray(a_row, dtype=float)
    b_row = np.asarray(b_row, dtype=float)
    m = a_row.size
    if m == 1:
        return np.array([[c]])
    raw = m * 2 ** (m - 1)
    limit = search_limit() if limit is None else limit
    if raw > limit:
        raise SearchGuardError("row corner enumeration refused", raw, limit)
    pattern = (np.arange(2 ** (m - 1))[:, None] >> np.arange(m - 1)[None, :]) & 1
    tol = eps * m
    found = []
    for k in range(m):
        others = [j for j in range(m) if j != k]
        fixed = np.where(pattern == 1, b_row[others], a_row[others])
        free = c - fixed.sum(axis=1)
        ok = (free >= a_row[k] - tol) & (free <= b_row[k] + tol)
        if not np.any(ok):
            continue
        block = np.empty((int(ok.sum()), m))
        block[:, others] = fixed[ok]
        block[:, k] = np.clip(free[ok], a_row[k], b_row[k])
        found.append(block)
    if not found:
        raise InvalidModelError("row has no feasible corner", ["mass"])
    corners = np.vstack(found)
    # dedupe on a rounded key but keep the first occurrence's exact values
    _, first = np.unique(corners, axis=0, return_index=True)
    return corners[np.sort(first)]


def _product_table(rows: list[np.ndarray], m: int) -> np.ndarray:
    table = np.ones((1, m))
    for r in rows:
        table = (table[:, None, :] * r[None, :, :]).reshape(-1, m)
    return table


def _search_corners(rows: list[np.ndarray], maximize: bool) -> tuple[float, list[int]]:
    """Exhaustive search over the cartesian product of per-row corners.

    Returns the best objective and the per-row corner indices of the first
    optimum in lexicographic enumeration order.
    """
    m = rows[0].shape[1]
    split = len(rows)
    size = 1
    while split > 0 and size * rows[split - 1].shape[0] <= _TAIL_CAP:
        split -= 1
        size *= rows[split].shape[0]
    if split == len(rows):
        split -= 1
        size = rows[split].shape[0]
    head, tail = rows[:split], rows[split:]
    tail_table = _product_table(tail, m)
    tail_shape = [r.shape[0] for r in tail]

    best_val = -np.inf if maximize else np.inf
    best_head: tuple = ()
    best_tail = 0
    chunk = max(1, _BLOCK_CELLS // max(1, tail_table.shape[0]))
    head_iter = itertools.product(*[range(r.shape[0]) for r in head])
    while True:
        block = list(itertools.islice(head_iter, chunk))
        if not block:
            break
        idx = np.array(block, dtype=np.int64).reshape(len(block), len(head))
        prefix = np.ones((len(block), m))
        for i, r in enumerate(head):
            prefix *= r[idx[:, i]]
        scores = prefix @ tail_table.T
        flat = int(np.argmax(scores) if maximize else np.argmin(scores))
        val = scores.flat[flat]
        if (maximize and val > best_val) or (not maximize and val < best_val):
            best_val = val
            h, t = divmod(flat, tail_table.shape[0])
            best_head = block[h]
            best_tail = t
    tail_idx = list(np.unravel_index(best_tail, tail_shape)) if tail_shape else []
    return float(best_val), list(best_head) + [int(t) for t in tail_idx]


def corner_space_size(inst: SumOfProductsInstance) -> int:
    """Number of distinct corner combinations the exact solver would visit."""
    total = 1
    for i in range(inst.n):
        total *= row_corners(inst.a[i], inst.b[i], inst.c[i], inst.eps).shape[0]
    return total


def solve_sum_of_products(inst: SumOfProductsInstance, limit: int | None = None) -> tuple[float, CornerAssignment]:
    """Exact optimum of the sum-of-products problem by corner enumeration.

    Returns the optimal value and a corner assignment attaining it.  Raises
    :class:`SearchGuardError` when the corner space exceeds ``limit``
    (default: :func:`search_limit`).
    """
    if not inst.feasible:
        raise InvalidModelError("infeasible instance: need sum(a_i) <= c_i <= sum(b_i)", ["mass"])
    limit = search_limit() if limit is None else limit
    rows = [row_corners(inst.a[i], inst.b[i], inst.c[i], inst.eps, limit) for i in range(inst.n)]
    size = float(np.prod([float(r.shape[0]) for r in rows]))
    if size > limit:
        raise SearchGuardError("sum-of-products corner search refused", size, limit)
    _, choice = _search_corners(rows, inst.sense == "max")
    x = np.vstack([rows[i][k] for i, k in enumerate(choice)])
    return inst.objective(x), CornerAssignment(x)


# ---------------------------------------------------------------------------
# context-specific fusion


def _greedy_posterior(p: np.ndarray, c: np.ndarray, target: int, lo, up, raise_mass: bool) -> float:
    """One pass of the greedy prior allocation; returns the posterior of ``target``."""
    p = p.copy()
    movable = np.ones(p.size, dtype=bool)
    movable[target] = False
    sigma = p.sum()
    while movable.any() and (sigma < 1.0 if raise_mass else sigma > 1.0):
        j = int(np.argmax(np.where(movable, c, -np.inf)))
        if raise_mass:
            step = min(up[j] - lo[j], 1.0 - sigma)
            p[j] += step
            sigma += step
        else:
            step = min(up[j] - lo[j], sigma - 1.0)
            p[j] -= step
            sigma -= step
        movable[j] = False
    num = p[target] * c[target]
    rest = float(np.dot(p, c)) - num
    if raise_mass and rest <= 0.0:
        # the other outcomes can never be supported
        return 1.0
    if num <= 0.0:
        return 0.0
    return num / (num + rest)


def context_specific_interval_bounds(prior: IntervalDistribution, lik: LikelihoodMatrix, eps: float = EPS):
    """Raw (untightened) posterior bounds of the greedy context-specific algorithm."""
    require_valid_interval(prior, eps)
    if lik.M != prior.M:
        raise StructureError(f"likelihoods cover M={lik.M} outcomes, prior covers {prior.M}")
    lo, up = reachable_bounds(prior)
    l_prod = np.prod(lik.lower, axis=0)
    u_prod = np.prod(lik.upper, axis=0)
    if not np.any((up > 0) & (u_prod > 0)):
        raise ConflictError("no posterior support: every hypothesis has zero prior or likelihood")
    M = prior.M
    post_lo = np.empty(M)
    post_up = np.empty(M)
    for t in range(M):
        c = u_prod.copy()
        c[t] = l_prod[t]
        post_lo[t] = _greedy_posterior(lo, c, t, lo, up, raise_mass=True)
        c = l_prod.copy()
        c[t] = u_prod[t]
        post_up[t] = _greedy_posterior(up, c, t, lo, up, raise_mass=False)
    return post_lo, post_up


def fuse_context_specific_interval(prior: IntervalDistribution, lik: LikelihoodMatrix, eps: float = EPS) -> IntervalDistribution:
    """Posterior interval distribution of ``H`` given interval likelihoods."""
    lo, up = context_specific_interval_bounds(prior, lik, eps)
    return tighten_interval_distribution(lo, up, eps)


# ---------------------------------------------------------------------------
# general fusion


def _stack_inputs(inputs: Sequence[IntervalDistribution], eps: float):
    inputs = list(inputs)
    if len(inputs) < 2:
        raise StructureError("general fusion needs N >= 2 inputs")
    if len({d.M for d in inputs}) != 1:
        raise StructureError("all inputs must share M")
    for d in inputs:
        require_valid_interval(d, eps)
    bounds = [reachable_bounds(d) for d in inputs]
    return np.vstack([b[0] for b in bounds]), np.vstack([b[1] for b in bounds])


def general_interval_a1_bounds(inputs: Sequence[IntervalDistribution], eps: float = EPS, limit: int | None = None):
    """Raw bounds of exact general fusion (one sum-of-products solve per bound)."""
    L, U = _stack_inputs(inputs, eps)
    if np.prod(U, axis=0).sum() <= 0.0:
        raise ConflictError("total conflict: no outcome can be shared by all inputs")
    N, M = L.shape
    post_lo = np.zeros(M)
    post_up = np.zeros(M)
    for t in range(M):
        rest = [j for j in range(M) if j != t]
        a, b = L[:, rest], U[:, rest]
        q = float(np.prod(L[:, t]))
        inst = SumOfProductsInstance(a, b, 1.0 - L[:, t], "max", eps)
        r, _ = solve_sum_of_products(inst, limit)
        if r <= 0.0:
            post_lo[t] = 1.0
        elif q > 0.0:
            post_lo[t] = q / (q + r)
        q = float(np.prod(U[:, t]))
        if q > 0.0:
            inst = SumOfProductsInstance(a, b, 1.0 - U[:, t], "min", eps)
            r, _ = solve_sum_of_products(inst, limit)
            post_up[t] = q / (q + r)
    return post_lo, post_up


def fuse_general_interval_a1(
    inputs: Sequence[IntervalDistribution], pairwise: bool = False, eps: float = EPS, limit: int | None = None
) -> IntervalDistribution:
    """Maximally tight general fusion via exact sum-of-products solves.

    With ``pairwise=True`` the inputs are folded two at a time, which keeps each
    solve at two rows but gives looser bounds than one simultaneous fusion.
    """
    inputs = list(inputs)
    if pairwise:
        if len(inputs) < 2:
            raise StructureError("general fusion needs N >= 2 inputs")
        current = inputs[0]
        for nxt in inputs[1:]:
            current = tighten_interval_distribution(*general_interval_a1_bounds([current, nxt], eps, limit), eps)
        return current
    return tighten_interval_distribution(*general_interval_a1_bounds(inputs, eps, limit), eps)


def general_interval_a2_bounds(inputs: Sequence[IntervalDistribution], eps: float = EPS):
    """Raw bounds of the O(NM) closed-form general fusion."""
    L, U = _stack_inputs(inputs, eps)
    l_sum, u_sum = L.sum(axis=1), U.sum(axis=1)
    l_prod, u_prod = np.prod(L, axis=0), np.prod(U, axis=0)
    L_prod_sum, U_prod_sum = np.prod(l_sum), np.prod(u_sum)
    L_sum_prod, U_sum_prod = l_prod.sum(), u_prod.sum()
    if U_sum_prod <= 0.0:
        raise ConflictError("total conflict: no outcome can be shared by all inputs")
    den_lo = np.minimum(l_prod + (U_sum_prod - u_prod), 1.0 - (L_prod_sum - L_sum_prod))
    den_up = np.maximum(u_prod + (L_sum_prod - l_prod), 1.0 - (U_prod_sum - U_sum_prod))
    post_lo = np.divide(l_prod, den_lo, out=np.zeros_like(l_prod), where=l_prod > 0)
    post_lo[(U_sum_prod - u_prod) <= 0.0] = 1.0
    post_up = np.divide(u_prod, den_up, out=np.zeros_like(u_prod), where=u_prod > 0)
    return np.clip(post_lo, 0.0, 1.0), np.clip(post_up, 0.0, 1.0)


def fuse_general_interval_a2(inputs: Sequence[IntervalDistribution], eps: float = EPS) -> IntervalDistribution:
    """Closed-form general fusion; never tighter than :func:`fuse_general_interval_a1`."""
    return tighten_interval_distribution(*general_interval_a2_bounds(inputs, eps), eps)
