"""Bayesian fusion of point probability distributions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import EPS, PointDistribution, StructureError
from .errors import ConflictError

#: Above this many factors per outcome, products are accumulated as log sums.
LOG_SPACE_THRESHOLD = 30


def _column_products(rows: np.ndarray) -> np.ndarray:
    """``prod_i rows[i, j]`` for each column, normalised by an arbitrary positive factor.

    Only ratios between columns matter to the callers, so for long products the
    result is rescaled so its largest entry is 1.
    """
    if rows.shape[0] <= LOG_SPACE_THRESHOLD:
        return np.prod(rows, axis=0)
    with np.errstate(divide="ignore"):
        logs = np.log(rows).sum(axis=0)
    if np.all(np.isneginf(logs)):
        return np.zeros(rows.shape[1])
    return np.exp(logs - logs.max())


def _as_probs(p) -> np.ndarray:
    return p.probs if isinstance(p, PointDistribution) else PointDistribution(p).probs


def fuse_context_specific_point(prior, likelihoods, eps: float = EPS) -> PointDistribution:
    """Posterior of ``H`` given observations with known likelihoods.

    ``likelihoods[i, j]`` is ``Pr(O_i = o_i | H = j)``; a 1-D array is one row.
    """
    prior = _as_probs(prior)
    lik = np.atleast_2d(np.asarray(likelihoods, dtype=float))
    if lik.shape[1] != prior.size:
        raise StructureError(f"likelihood rows have {lik.shape[1]} entries, prior has {prior.size}")
    if lik.shape[0] < 1:
        raise StructureError("need at least one observation")
    if np.any(lik < 0) or np.any(lik > 1):
        raise StructureError("likelihoods must lie in [0, 1]")
    weights = np.vstack([prior[None, :], lik])
    joint = _column_products(weights)
    total = joint.sum()
    if total <= 0.0:
        raise ConflictError("all hypotheses have zero posterior support")
    return PointDistribution(joint / total, eps=max(eps, 1e-9))


def fuse_general_point(dists: Sequence, eps: float = EPS) -> PointDistribution:
    """Distribution of the common value of independent ``H_1..H_N`` given they agree."""
    probs = [_as_probs(p) for p in dists]
    if not probs:
        raise StructureError("need a list of point distributions")
    if len({p.size for p in probs}) != 1:
        raise StructureError("all distributions must share M")
    rows = np.vstack(probs)
    if rows.shape[0] == 1:
        return PointDistribution(rows[0], eps=max(eps, 1e-9))
    joint = _column_products(rows)
    total = joint.sum()
    if total <= 0.0:
        raise ConflictError("total conflict: no common value possible")
    return PointDistribution(joint / total, eps=max(eps, 1e-9))


def fuse_sequential_point(mode: str, inputs, prior=None, eps: float = EPS) -> PointDistribution:
    """Fold inputs in one at a time.

    ``mode="context"`` takes ``prior`` and a sequence of likelihood rows;
    ``mode="general"`` takes a sequence of distributions (the first acts as the
    running result).
    """
    if mode == "context":
        if prior is None:
            raise StructureError("context mode needs a prior")
        current = PointDistribution(_as_probs(prior))
        rows = np.atleast_2d(np.asarray(inputs, dtype=float))
        for row in rows:
            current = fuse_context_specific_point(current, row[None, :], eps)
        return current
    if mode == "general":
        inputs = list(inputs)
        if not inputs:
            raise StructureError("need at least one distribution")
        current = PointDistribution(_as_probs(inputs[0]))
        for nxt in inputs[1:]:
            current = fuse_general_point([current, nxt], eps)
        return current
    raise StructureError(f"unknown fusion mode {mode!r}")
