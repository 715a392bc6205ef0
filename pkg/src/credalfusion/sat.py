"""Reduction of clause satisfiability to the sum-of-products problem.

A formula is given as ``m`` clauses over ``n`` variables where each clause
has one slot per variable holding ``0`` (absent), ``+1`` (``x_i``) or ``-1``
(``not x_i``).  The reduction builds an ``(n + m) x 2n`` instance whose
maximum reaches ``n`` exactly when the clauses are jointly satisfiable.
Column ``2i`` (0-based) stands for ``x_i`` being true, column ``2i + 1`` for
it being false.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import SearchGuardError, StructureError
from .interval import CornerAssignment, SumOfProductsInstance, solve_sum_of_products

#: Default cap on ``n + m`` for :func:`decide_sat_via_sop`.
MAX_REDUCED_ROWS = 12
#: Largest variable count accepted by :func:`brute_force_sat`.
MAX_BRUTE_FORCE_VARS = 20
SAT_THRESHOLD_EPS = 1e-6

ABSENT, POSITIVE, NEGATIVE = 0, 1, -1


@dataclass(frozen=True)
class SatInstance:
    """Clauses over ``n`` variables, one literal slot per variable."""

    n: int
    clauses: tuple

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise StructureError("need n >= 1 variables")
        rows = tuple(tuple(int(v) for v in c) for c in self.clauses)
        if not rows:
            raise StructureError("need at least one clause")
        for j, row in enumerate(rows):
            if len(row) != self.n:
                raise StructureError(f"clause {j + 1} has {len(row)} slots, expected {self.n}")
            if any(v not in (ABSENT, POSITIVE, NEGATIVE) for v in row):
                raise StructureError(f"clause {j + 1} has a slot outside {{-1, 0, 1}}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "clauses", rows)

    @classmethod
    def from_literals(cls, n: int, clauses) -> "SatInstance":
        """Build from DIMACS-style signed literals, e.g. ``[[1, 2], [-1, 3]]``."""
        rows = []
        for j, clause in enumerate(clauses):
            row = [ABSENT] * n
            for lit in clause:
                lit = int(lit)
                if lit == 0 or abs(lit) > n:
                    raise StructureError(f"clause {j + 1}: literal {lit} out of range for n={n}")
                i = abs(lit) - 1
                sign = POSITIVE if lit > 0 else NEGATIVE
                if row[i] not in (ABSENT, sign):
                    raise StructureError(f"clause {j + 1}: variable {i + 1} appears with both polarities")
                row[i] = sign
            rows.append(row)
        return cls(n, tuple(map(tuple, rows)))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def literals(self) -> list[list[int]]:
        return [[(i + 1) * v for i, v in enumerate(row) if v] for row in self.clauses]

    def satisfied_by(self, assignment) -> bool:
        values = [bool(v) for v in assignment]
        if len(values) != self.n:
            raise StructureError(f"assignment has {len(values)} values, expected {self.n}")
        return all(
            any((v == POSITIVE and values[i]) or (v == NEGATIVE and not values[i]) for i, v in enumerate(row))
            for row in self.clauses
        )


def reduce_sat_to_sop(s: SatInstance) -> SumOfProductsInstance:
    """Build the sum-of-products instance encoding ``s`` (sense ``max``).

    An empty clause gives a row whose lower bounds already exceed its sum, so
    the result may be infeasible; check ``.feasible`` before solving.
    """
    n, m = s.n, s.m
    a = np.ones((n + m, 2 * n))
    for i in range(n):
        a[i, 2 * i] = a[i, 2 * i + 1] = 0.0
    for j, row in enumerate(s.clauses):
        for i, v in enumerate(row):
            if v == POSITIVE:
                a[n + j, 2 * i] = 0.0
            elif v == NEGATIVE:
                a[n + j, 2 * i + 1] = 0.0
    b = np.ones_like(a)
    c = np.full(n + m, 2.0 * n - 1.0)
    return SumOfProductsInstance._unchecked(a, b, c, "max")


def decode_assignment(s: SatInstance, witness: CornerAssignment) -> tuple[bool, ...]:
    """Read variable values off the variable rows of an optimal corner."""
    x = witness.x
    return tuple(bool(x[i, 2 * i] < x[i, 2 * i + 1]) for i in range(s.n))


def solve_sat_via_sop(s: SatInstance, max_rows: int = MAX_REDUCED_ROWS, limit: int | None = None):
    """Return ``(satisfiable, r, assignment)``; ``assignment`` is None when unsatisfiable.

    ``r`` is the reduced maximum, or ``-inf`` if the reduced instance is
    infeasible (some clause has no literal).
    """
    rows = s.n + s.m
    if rows > max_rows:
        raise SearchGuardError(f"reduced instance has {rows} rows, cap is {max_rows}", rows, max_rows)
    inst = reduce_sat_to_sop(s)
    if not inst.feasible:
        return False, float("-inf"), None
    r, witness = solve_sum_of_products(inst, limit)
    if r >= s.n - SAT_THRESHOLD_EPS:
        return True, r, decode_assignment(s, witness)
    return False, r, None


def decide_sat_via_sop(s: SatInstance, max_rows: int = MAX_REDUCED_ROWS, limit: int | None = None) -> bool:
    """Decide satisfiability by thresholding the reduced maximum at ``n``."""
    return solve_sat_via_sop(s, max_rows, limit)[0]


def brute_force_sat(s: SatInstance) -> bool:
    """Try every assignment."""
    if s.n > MAX_BRUTE_FORCE_VARS:
        raise SearchGuardError(f"brute force over {s.n} variables refused", 2**s.n, 2**MAX_BRUTE_FORCE_VARS)
    table = np.array(list(itertools.product((False, True), repeat=s.n)))
    ok = np.ones(len(table), dtype=bool)
    for row in s.clauses:
        row = np.array(row)
        clause = np.zeros(len(table), dtype=bool)
        for i in np.flatnonzero(row == POSITIVE):
            clause |= table[:, i]
        for i in np.flatnonzero(row == NEGATIVE):
            clause |= ~table[:, i]
        ok &= clause
    return bool(ok.any())
