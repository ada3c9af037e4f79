"""
A caterpillar from its degrees and neighbour degree sums
========================================================

C1 is an eight-vertex caterpillar.  Its (D, F) data is enough to rebuild a
caterpillar; along the way we print the colour-degree matrix of its stub-stars
and, for a larger random tree, the swaps the assembler uses to glue
monochromatic forests together.
"""

from stubstar.assembler import SwapTrace, construct, realize, verify_realization
from stubstar.model import (
    LabeledGraph,
    color_degree_matrix,
    color_list,
    ensemble_from_graph,
    instance_from_graph,
    stub_stars_from_graph,
)

c1 = LabeledGraph(8, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6), (6, 7)])
inst = instance_from_graph(c1)
print("D =", inst.d_list)
print("F =", inst.f_list)

# rows are colours (i, j), columns the stub-stars of the eight vertices
M = color_degree_matrix(stub_stars_from_graph(c1), delta=3)
for col in color_list(3):
    print(col, M.row(col))

# solve, realize, align to the instance and verify
g = construct(inst, "caterpillar")
print("caterpillar edges:", g.edges)
print("verified:", bool(verify_realization(g, inst, "caterpillar")))

# C1 needs no swaps; a larger random tree shows the component merging
from stubstar.oracle import random_tree

trace = SwapTrace()
realize(ensemble_from_graph(random_tree(40, 4, 3)), "tree", trace)
print("swaps used:", len(trace.steps))
for step in trace.steps:
    print(" ", step)
