"""
Exact general fusion is hard
============================

Maximising a sum of products over box-and-sum constraints, the core step of
exact interval fusion, can decide satisfiability of a clause set.  This script
reduces a small formula, solves the reduced problem and reads the assignment
back.
"""

from credalfusion import SatInstance, brute_force_sat, reduce_sat_to_sop
from credalfusion.sat import solve_sat_via_sop

# (x1 or x2 or x3), (x2 or not x3), (not x1 or not x2), (not x1 or not x2 or not x3)
s = SatInstance.from_literals(3, [[1, 2, 3], [2, -3], [-1, -2], [-1, -2, -3]])
inst = reduce_sat_to_sop(s)
print("reduced problem:", inst.a.shape[0], "rows,", inst.a.shape[1], "columns, sense", inst.sense)

satisfiable, r, assignment = solve_sat_via_sop(s)
print("satisfiable:", satisfiable, " objective:", r, " (variables:", s.n, ")")
print("assignment:", assignment, " satisfies all clauses:", s.satisfied_by(assignment))
print("brute force agrees:", brute_force_sat(s) == satisfiable)

# x1 and not x1 cannot both hold
contradiction = SatInstance.from_literals(1, [[1], [-1]])
print("contradiction satisfiable:", solve_sat_via_sop(contradiction)[0])
