"""
Carbon skeleton from a digested NMR peak table
==============================================

2-methylbutane (C5H12).  Each peak says how many hydrogens sit on the carbon
(k) and into how many parts the signal splits (l + 1, l = hydrogens on the
neighbouring carbons).  That gives each carbon's skeletal degree 4 - k and the
sum of its neighbours' degrees, which is a (D, F) instance.
"""

from stubstar.assembler import construct
from stubstar.nmr import formula_hint, nmr_to_instance, parse_peaks

table = """
# k l count
3 1 2   # the two CH3 on the branch carbon
1 8 1   # the CH
2 4 1   # the CH2
3 2 1   # the CH3 at the end of the chain
"""
peaks = parse_peaks(table)
inst = nmr_to_instance(peaks)
print("D =", inst.d_list)
print("F =", inst.f_list)
print(formula_hint("C5H12", inst.n))

g = construct(inst, "tree")
print("skeleton bonds:", g.edges)
