"""
Random trees: time to a first solution and number of solutions
===============================================================

A small version of the two benchmark curves.  Random trees with maximum
degree 4 are drawn, turned into (D, F) instances and then
(a) solved and rebuilt as trees, timing build + solve + realize, and
(b) counted: how many stub-star ensembles satisfy the tree system.
The full runs are `stubstar bench time` and `stubstar bench count`.
"""

import numpy as np

from stubstar.bench import run_count, run_time
from stubstar.feasibility import eg_divergence_report

trials = 10

# (a) first-solution time, milliseconds
for rec in run_time([100, 300, 500], trials=trials, seed=0, n_workers=1):
    print(f"n={rec.n:4d}  mean {rec.mean:7.1f} ms  sd {rec.stddev:6.1f}")

# (b) number of feasible ensembles grows quickly with n
for rec in run_count([10, 20, 30, 40], trials=trials, seed=0, n_workers=1):
    print(f"n={rec.n:4d}  mean count {rec.mean:9.2f}  max {rec.max:.0f}")

# the linear Erdos-Gallai row against the classical test
rep = eg_divergence_report(200, delta=4, seed=1)
print(rep.to_text().splitlines()[1])
print("labels:", dict(rep.counts))
print("share divergent:", np.round(rep.divergences / len(rep.labels), 3))
