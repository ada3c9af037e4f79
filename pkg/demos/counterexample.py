"""
Four vertices, one realization, no forest
=========================================

The instance D = (2, 2, 1, 3), F = (5, 5, 3, 5) has exactly one simple
realization, a triangle with a pendant edge.  Every single colour of its
stub-star ensemble is forest realizable on its own, yet no forest exists:
the colours (2,2) and (2,3) together carry too many stubs.
"""

from stubstar import build_system, construct, enumerate_all, solve_first
from stubstar.feasibility import forest_violations, validate_ensemble
from stubstar.io import format_edge_list
from stubstar.model import instance_from_lists

inst = instance_from_lists((2, 2, 1, 3), (5, 5, 3, 5))

# one feasible ensemble as a simple graph
sysm = build_system(inst, "simple")
sols = enumerate_all(sysm)
ens = sysm.ensemble(sols.solutions[0])
print("simple ensembles:", len(sols))
print("ensemble:", ens)

# and the graph itself, aligned to the instance's vertex order
g = construct(inst, "simple")
print("edges:")
print(format_edge_list(g), end="")

# the forest and tree systems are infeasible
for cls in ("forest", "tree"):
    print(cls, "feasible:", solve_first(build_system(inst, cls)) is not None)

# which colour sets break the forest condition
print("validator:", validate_ensemble(ens, "forest").violations)
print("violating colour sets:", forest_violations(ens))
