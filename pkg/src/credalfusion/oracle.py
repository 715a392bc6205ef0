"""Brute-force reference bounds and randomized containment checks.

Nothing here calls the fusion algorithms it is meant to check: vertices of
interval polytopes and DS credal sets are enumerated from scratch and every
combination is fused with plain Bayes' rule.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import ds, interval, point
from .core import (
    EPS,
    IntervalDistribution,
    LikelihoodMatrix,
    MassFunction,
    PointDistribution,
    contains_point,
    reachable_bounds,
    search_limit,
)
from .errors import ConflictError, EmptyCredalSetError, SearchGuardError, StructureError


@dataclass
class OracleBounds:
    """Exact lower/upper posterior probabilities found by enumeration.

    For interval oracles ``lower``/``upper`` are per outcome.  For DS oracles
    they are dense tables over subset bitmasks (``Bel`` and ``Pl``).
    """

    lower: np.ndarray
    upper: np.ndarray
    corner_count: int
    runtime: float
    skipped: int = 0


# ---------------------------------------------------------------------------
# vertex enumeration


def interval_vertices(lo, up, eps: float = EPS, grid_step: float | None = None) -> np.ndarray:
    """All points of ``{lo <= p <= up, sum p = 1}`` with at most one coordinate off its bounds.

    That set contains every vertex.  ``grid_step`` optionally adds a simplex
    grid of feasible points.
    """
    lo = np.asarray(lo, dtype=float)
    up = np.asarray(up, dtype=float)
    M = lo.size
    pts = []
    for k in range(M):
        others = [j for j in range(M) if j != k]
        for pattern in itertools.product((0, 1), repeat=M - 1):
            p = np.empty(M)
            for j, bit in zip(others, pattern):
                p[j] = up[j] if bit else lo[j]
            p[k] = 1.0 - p[others].sum()
            if lo[k] - eps <= p[k] <= up[k] + eps:
                p[k] = min(max(p[k], lo[k]), up[k])
                pts.append(p)
    if grid_step is not None:
        steps = int(round(1.0 / grid_step))
        for combo in itertools.product(range(steps + 1), repeat=M - 1):
            if sum(combo) > steps:
                continue
            p = np.array(list(combo) + [steps - sum(combo)], dtype=float) / steps
            if np.all(p >= lo - eps) and np.all(p <= up + eps):
                pts.append(p)
    if not pts:
        raise EmptyCredalSetError("empty credal set", ["mass"])
    arr = np.array(pts)
    _, first = np.unique(arr, axis=0, return_index=True)
    return arr[np.sort(first)]


def ds_focusings(m: MassFunction, limit: int | None = None) -> np.ndarray:
    """Every distribution obtained by moving each focal mass onto one of its elements."""
    limit = search_limit() if limit is None else limit
    focal = [(v, [j for j in range(m.M) if k >> j & 1]) for k, v in m.masses.items()]
    raw = float(np.prod([float(len(mem)) for _, mem in focal]))
    if raw > limit:
        raise SearchGuardError("mass focusing enumeration refused", raw, limit)
    pts = []
    for choice in itertools.product(*[mem for _, mem in focal]):
        p = np.zeros(m.M)
        for (v, _), j in zip(focal, choice):
            p[j] += v
        pts.append(p)
    arr = np.array(pts)
    _, first = np.unique(arr, axis=0, return_index=True)
    return arr[np.sort(first)]


def likelihood_corners(lik: LikelihoodMatrix) -> np.ndarray:
    """Column products ``prod_i p[i, j]`` for every endpoint choice of every entry."""
    N, M = lik.lower.shape
    out = []
    for pattern in itertools.product((0, 1), repeat=N * M):
        sel = np.array(pattern, dtype=bool).reshape(N, M)
        out.append(np.prod(np.where(sel, lik.upper, lik.lower), axis=0))
    arr = np.array(out)
    _, first = np.unique(arr, axis=0, return_index=True)
    return arr[np.sort(first)]


def _normalise(weights: np.ndarray):
    """Row-normalise, dropping rows with zero total; returns (posteriors, dropped)."""
    totals = weights.sum(axis=1)
    keep = totals > 0
    return weights[keep] / totals[keep, None], int((~keep).sum())


def _context_posteriors(prior_pts: np.ndarray, lik: LikelihoodMatrix):
    corners = likelihood_corners(lik)
    weights = (prior_pts[:, None, :] * corners[None, :, :]).reshape(-1, prior_pts.shape[1])
    return _normalise(weights)


def _general_posteriors(point_sets: list[np.ndarray], limit: int):
    size = float(np.prod([float(s.shape[0]) for s in point_sets]))
    if size > limit:
        raise SearchGuardError("oracle combination sweep refused", size, limit)
    M = point_sets[0].shape[1]
    weights = np.ones((1, M))
    for s in point_sets:
        weights = (weights[:, None, :] * s[None, :, :]).reshape(-1, M)
    return _normalise(weights)


def _guard(M: int, N: int, max_outcomes: int, max_inputs: int):
    if M > max_outcomes or N > max_inputs:
        raise SearchGuardError(
            f"oracle limited to M <= {max_outcomes}, N <= {max_inputs} (got M={M}, N={N})",
            float(M * N),
            float(max_outcomes * max_inputs),
        )


def _unpack(mode: str, inputs):
    if mode == "context":
        prior, lik = inputs
        if lik.M != prior.M:
            raise StructureError("prior and likelihoods disagree on M")
        return prior, lik
    if mode == "general":
        inputs = list(inputs)
        if len(inputs) < 2:
            raise StructureError("general fusion needs N >= 2 inputs")
        return inputs, None
    raise StructureError(f"unknown mode {mode!r}")


def oracle_interval_bounds(
    mode: str,
    inputs,
    max_outcomes: int = 3,
    max_inputs: int = 3,
    grid_step: float | None = None,
    limit: int | None = None,
) -> OracleBounds:
    """Exact posterior bounds per outcome for interval fusion, by corner sweep.

    ``inputs`` is ``(prior, likelihoods)`` in context mode and a list of
    :class:`IntervalDistribution` in general mode.
    """
    limit = search_limit() if limit is None else limit
    start = time.perf_counter()
    first, lik = _unpack(mode, inputs)
    if mode == "context":
        _guard(first.M, lik.N, max_outcomes, max_inputs)
        verts = interval_vertices(*reachable_bounds(first), grid_step=grid_step)
        post, skipped = _context_posteriors(verts, lik)
    else:
        _guard(first[0].M, len(first), max_outcomes, max_inputs)
        sets = [interval_vertices(*reachable_bounds(d), grid_step=grid_step) for d in first]
        post, skipped = _general_posteriors(sets, limit)
    if post.shape[0] == 0:
        raise ConflictError("every enumerated configuration has zero support")
    return OracleBounds(post.min(axis=0), post.max(axis=0), post.shape[0] + skipped,
                        time.perf_counter() - start, skipped)


def _subset_envelopes(post: np.ndarray):
    M = post.shape[1]
    membership = (np.arange(1 << M)[None, :] >> np.arange(M)[:, None]) & 1
    totals = post @ membership
    lower, upper = totals.min(axis=0), totals.max(axis=0)
    lower[0] = upper[0] = 0.0
    return lower, upper


def oracle_ds_bounds(
    mode: str, inputs, max_outcomes: int = 3, max_inputs: int = 3, limit: int | None = None
) -> OracleBounds:
    """Exact min/max posterior probability of every subset for DS fusion.

    Enumerates every way of focusing each focal mass onto one element, fuses
    each combination with Bayes' rule and takes envelopes per subset.
    """
    limit = search_limit() if limit is None else limit
    start = time.perf_counter()
    first, lik = _unpack(mode, inputs)
    if mode == "context":
        _guard(first.M, lik.N, max_outcomes, max_inputs)
        post, skipped = _context_posteriors(ds_focusings(first, limit), lik)
    else:
        _guard(first[0].M, len(first), max_outcomes, max_inputs)
        post, skipped = _general_posteriors([ds_focusings(m, limit) for m in first], limit)
    if post.shape[0] == 0:
        raise ConflictError("every enumerated configuration has zero support")
    lower, upper = _subset_envelopes(post)
    return OracleBounds(lower, upper, post.shape[0] + skipped, time.perf_counter() - start, skipped)


# ---------------------------------------------------------------------------
# sampling


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _interval_member(d: IntervalDistribution, rng: np.random.Generator, corner_prob: float) -> np.ndarray:
    lo, up = d.lower, d.upper
    if lo.sum() > 1 + EPS or up.sum() < 1 - EPS:
        raise EmptyCredalSetError("empty credal set", ["mass"])
    p = lo.copy()
    slack = 1.0 - lo.sum()
    cap = up - lo
    if rng.random() < corner_prob:
        for j in rng.permutation(d.M):
            step = min(cap[j], slack)
            p[j] += step
            slack -= step
        return p
    # water-fill the slack along random weights, respecting capacities
    free = cap > 0
    while slack > 1e-15 and free.any():
        w = np.zeros(d.M)
        w[free] = rng.dirichlet(np.ones(int(free.sum())))
        share = slack * w
        room = up - p
        take = np.minimum(share, room)
        p += take
        slack -= take.sum()
        free &= (up - p) > 1e-15
    return p


def _ds_member(m: MassFunction, rng: np.random.Generator, corner_prob: float) -> np.ndarray:
    p = np.zeros(m.M)
    for k, v in m.masses.items():
        members = [j for j in range(m.M) if k >> j & 1]
        if len(members) == 1 or rng.random() < corner_prob:
            p[members[rng.integers(len(members))]] += v
        else:
            p[members] += v * rng.dirichlet(np.ones(len(members)))
    return p


def sample_member_point(model, seed=None, corner_prob: float = 0.25) -> PointDistribution:
    """Random distribution inside ``model``; deterministic for a fixed seed.

    With probability ``corner_prob`` the sample is a vertex (a random ordering
    for intervals, a random focusing for DS masses) so that extreme members
    show up regularly.
    """
    rng = _rng(seed)
    if isinstance(model, PointDistribution):
        return model
    if isinstance(model, IntervalDistribution):
        p = _interval_member(model, rng, corner_prob)
    elif isinstance(model, MassFunction):
        p = _ds_member(model, rng, corner_prob)
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    p = np.clip(p, 0.0, 1.0)
    return PointDistribution(p / p.sum(), eps=1e-9)


def sample_likelihoods(lik: LikelihoodMatrix, seed=None, corner_prob: float = 0.25) -> np.ndarray:
    """One point value per likelihood interval, with endpoints over-represented."""
    rng = _rng(seed)
    u = rng.random(lik.lower.shape)
    ends = rng.random(lik.lower.shape) < corner_prob
    u = np.where(ends, np.round(u), u)
    return lik.lower + u * (lik.upper - lik.lower)


# ---------------------------------------------------------------------------
# containment checks


@dataclass(frozen=True)
class FusionOp:
    """A named fusion operation: its mode, input kind and implementation."""

    name: str
    mode: str
    kind: str
    run: Callable
    guaranteed: bool = True


def _point_context(inputs, eps):
    prior, lik = inputs
    values = lik.lower if isinstance(lik, LikelihoodMatrix) else lik
    return point.fuse_context_specific_point(prior, values, eps)


FUSION_OPS = {
    op.name: op
    for op in [
        FusionOp("point-context", "context", "point", _point_context),
        FusionOp("point-general", "general", "point", lambda x, eps: point.fuse_general_point(x, eps)),
        FusionOp("interval-context", "context", "interval",
                 lambda x, eps: interval.fuse_context_specific_interval(x[0], x[1], eps)),
        FusionOp("interval-a1", "general", "interval", lambda x, eps: interval.fuse_general_interval_a1(x, eps=eps)),
        FusionOp("interval-a1-pairwise", "general", "interval",
                 lambda x, eps: interval.fuse_general_interval_a1(x, pairwise=True, eps=eps)),
        FusionOp("interval-a2", "general", "interval", lambda x, eps: interval.fuse_general_interval_a2(x, eps)),
        FusionOp("ds-context", "context", "ds", lambda x, eps: ds.fuse_context_specific_ds(x[0], x[1], eps)),
        FusionOp("ds-a1", "general", "ds", lambda x, eps: ds.fuse_general_ds_a1(x, eps=eps)),
        FusionOp("ds-a1-pairwise", "general", "ds", lambda x, eps: ds.fuse_general_ds_a1(x, pairwise=True, eps=eps)),
        FusionOp("ds-a2", "general", "ds", lambda x, eps: ds.fuse_general_ds_a2(x, eps)),
        FusionOp("dempster", "general", "ds", lambda x, eps: ds.dempster_combine(x, eps), guaranteed=False),
    ]
}


@dataclass
class ContainmentCheck:
    """Outcome of :func:`check_containment`; ``violations`` hold reproducible tuples."""

    op: str
    trials: int
    seed: int | None
    violations: list = field(default_factory=list)
    violation_count: int = 0
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def summary(self) -> str:
        verdict = "pass" if self.passed else f"{self.violation_count} violation(s)"
        return f"{self.op}: {self.trials} trials, seed={self.seed}, {verdict}, skipped={self.skipped}"


def check_containment(op: str, inputs, trials: int = 500, seed: int | None = 0, eps: float = EPS,
                      max_examples: int = 10) -> ContainmentCheck:
    """Fuse randomly chosen member points and test membership in the fused model.

    ``inputs`` is ``(prior, likelihoods)`` for context ops and a list of models
    for general ops.  Trials whose pointwise fusion has zero support are
    skipped and counted.
    """
    if op not in FUSION_OPS:
        raise StructureError(f"unknown fusion op {op!r}; choose from {sorted(FUSION_OPS)}")
    spec = FUSION_OPS[op]
    fused = spec.run(inputs, eps)
    rng = np.random.default_rng(seed)
    report = ContainmentCheck(op, trials, seed)
    for _ in range(trials):
        try:
            if spec.mode == "context":
                prior, lik = inputs
                p0 = sample_member_point(prior, rng)
                if isinstance(lik, LikelihoodMatrix):
                    values = sample_likelihoods(lik, rng)
                else:
                    values = np.atleast_2d(np.asarray(lik, dtype=float))
                members = {"prior": p0.probs.tolist(), "likelihoods": values.tolist()}
                result = point.fuse_context_specific_point(p0, values, eps)
            else:
                pts = [sample_member_point(m, rng) for m in inputs]
                members = {"inputs": [p.probs.tolist() for p in pts]}
                result = point.fuse_general_point(pts, eps)
        except ConflictError:
            report.skipped += 1
            continue
        if not contains_point(fused, result, eps):
            report.violation_count += 1
            if len(report.violations) < max_examples:
                report.violations.append({"members": members, "fused_point": result.probs.tolist()})
    return report
