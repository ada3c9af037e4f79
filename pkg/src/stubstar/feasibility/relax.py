"""Linear-relaxation pruning for the branch-and-propagate search.

At a search node the linear rows are restricted to the still-free variables
and handed to an LP solver; if even the continuous relaxation is empty, the
node has no integer solution.  Pruning is sound, so it changes only how fast
the first solution is reached, never which one it is.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog


class Relaxation:
    """Dense copy of a compiled system's rows plus optional conditional rows.

    ``conditional(lo, hi)`` may return extra rows ``(A_x, b)`` over the first
    ``A_x.shape[1]`` variables that every completion of the node satisfies.
    """

    def __init__(self, comp, conditional=None):
        nv = len(comp.names)
        A = np.zeros((comp.m, nv))
        np.add.at(A, (comp.all_r, comp.all_c), comp.all_a)
        self.A = A
        self.b = comp.b.astype(float)
        self.nv = nv
        self.conditional = conditional
        self.calls = 0
        self.pruned = 0
        # recent LP points; a node containing one of them needs no new LP
        self.points: list[np.ndarray] = []
        self._weights = np.random.default_rng(12345).random(nv) + 0.5

    def _rows(self, lo, hi):
        """Rows restricted to the free variables, or a bool if already decided."""
        free = lo < hi
        if not free.any():
            return True
        A, b = self.A, self.b
        if self.conditional is not None:
            extra = self.conditional(lo, hi)
            if extra is not None:
                Ax, bx = extra
                pad = np.zeros((Ax.shape[0], self.nv))
                pad[:, : Ax.shape[1]] = Ax
                A = np.vstack([A, pad])
                b = np.r_[b, bx]
        fixed_part = A[:, ~free] @ lo[~free]
        Af = A[:, free]
        bf = b - fixed_part
        live = np.any(Af != 0, axis=1)
        if np.any(bf[~live] < -1e-9):
            return False
        Af, bf = Af[live], bf[live]
        if len(bf) == 0:
            return True
        # identical rows: keep the tightest right-hand side.  Rows are keyed by a
        # random projection; a collision could only drop a row, which is sound.
        h = Af @ self._weights[: Af.shape[1]]
        uniq, first, inv = np.unique(h, return_index=True, return_inverse=True)
        tight = np.full(len(uniq), np.inf)
        np.minimum.at(tight, inv.ravel(), bf)
        return A, b, free, Af[first], tight

    def _in_box(self, pt, lo, hi, A, b):
        return np.all(pt >= lo - 1e-9) and np.all(pt <= hi + 1e-9) and np.all(A @ pt <= b + 1e-6)

    def _solve(self, c, Af, tight, lo, hi, free):
        self.calls += 1
        res = linprog(c, A_ub=Af, b_ub=tight, bounds=np.c_[lo[free], hi[free]], method="highs")
        if res.status == 2:
            self.pruned += 1
        if res.status == 0:
            pt = lo.astype(float)
            pt[free] = res.x
            self.points = [pt] + self.points[:7]
        return res

    def feasible(self, lo: np.ndarray, hi: np.ndarray) -> bool:
        rows = self._rows(lo, hi)
        if isinstance(rows, bool):
            return rows
        A, b, free, Af, tight = rows
        for pt in self.points:
            if self._in_box(pt, lo, hi, A, b):
                return True
        return self._solve(np.zeros(Af.shape[1]), Af, tight, lo, hi, free).status != 2

    def min_value(self, lo: np.ndarray, hi: np.ndarray, j: int) -> int | None:
        """Smallest value of variable ``j`` the relaxation allows (rounded up),
        or None when the relaxation is empty."""
        rows = self._rows(lo, hi)
        if isinstance(rows, bool):
            return int(lo[j]) if rows else None
        A, b, free, Af, tight = rows
        if not free[j]:
            return int(lo[j])
        c = np.zeros(Af.shape[1])
        c[np.count_nonzero(free[:j])] = 1.0
        res = self._solve(c, Af, tight, lo, hi, free)
        if res.status == 2:
            return None
        if res.status != 0:
            return int(lo[j])
        return max(int(lo[j]), int(np.ceil(res.fun - 1e-7)))
