"""Feasibility systems over the stub-star counts ``x_lambda`` for each graph class.

Two encodings are produced:

``semantic``  the linear core (coupling to the (d, f) histogram, forced
              bipartite balance, parity) plus side checks that evaluate the
              min/max/top-k quantities directly once their variables are fixed.
``paper``     everything as linear rows: big-M min/max chains for the loopless
              maximum, DP-table variables for the simple-graph rows, and one
              row per colour set for forests.
"""

from __future__ import annotations

import enum

import numpy as np

from ..model import BoundError, Ensemble, GraphClass, Instance, Partition
from .. import seqcheck
from .kernel import Kernel, kernel
from .system import LinExpr, LinearSystem, encode_max, encode_min

PAPER_DELTA_CAP = 4


class Encoding(str, enum.Enum):
    SEMANTIC = "semantic"
    PAPER = "paper"


def _caterpillar_forbidden(lam: Partition) -> bool:
    return lam.height > 1 and sum(1 for p in lam.parts if p > 1) >= 3


class StubStarSystem(LinearSystem):
    """A :class:`LinearSystem` that remembers its instance and partition variables."""

    def __init__(self, inst: Instance, cls: GraphClass, encoding: Encoding):
        super().__init__(f"{cls.value}-{encoding.value}")
        self.instance = inst
        self.cls = cls
        self.encoding = encoding
        self.kernel: Kernel = kernel(inst.delta)
        self.x_names = [self.kernel.partition_var(lam) for lam in self.kernel.partitions]
        self.projection = tuple(self.x_names)

    def x_vector(self, assignment) -> np.ndarray:
        return np.array([assignment[n] for n in self.x_names], dtype=np.int64)

    def ensemble(self, assignment) -> Ensemble:
        x = self.x_vector(assignment)
        counts = {lam: int(v) for lam, v in zip(self.kernel.partitions, x) if v}
        return Ensemble(counts, self.kernel.delta)


def build_system(
    inst: Instance,
    cls: GraphClass | str,
    encoding: Encoding | str = Encoding.SEMANTIC,
) -> StubStarSystem:
    cls = GraphClass(cls)
    encoding = Encoding(encoding)
    K = kernel(inst.delta)
    n = inst.n
    delta = inst.delta
    if encoding is Encoding.PAPER and delta > PAPER_DELTA_CAP and cls is GraphClass.SIMPLE:
        raise BoundError(f"paper encoding of simple systems supports delta <= {PAPER_DELTA_CAP}")
    sysm = StubStarSystem(inst, cls, encoding)
    hist = inst.histogram

    x = {}
    for lam, name in zip(K.partitions, sysm.x_names):
        ub = hist.get((lam.height, lam.size), 0)
        if cls is GraphClass.CATERPILLAR and _caterpillar_forbidden(lam):
            ub = 0
        x[lam] = sysm.add_var(name, 0, ub)

    # coupling to the (d, f) histogram
    classes: dict[tuple[int, int], list[Partition]] = {}
    for lam in K.partitions:
        classes.setdefault((lam.height, lam.size), []).append(lam)
    for (d, f), lams in classes.items():
        expr = sum((x[lam] for lam in lams), LinExpr())
        sysm.add(expr, "==", hist.get((d, f), 0), f"y_{d}_{f}")
    for key in hist:
        if key not in classes:
            # a (d, f) pair no partition can produce (f < d)
            sysm.add(LinExpr(), "==", 1, f"y_{key[0]}_{key[1]}_impossible")

    def stubs(i, j) -> LinExpr:
        return sum((x[lam] * lam.count(j) for lam in K.partitions if lam.height == i), LinExpr())

    for i in range(1, delta + 1):
        for j in range(i + 1, delta + 1):
            sysm.add(stubs(i, j) - stubs(j, i), "==", 0, f"balance_{i}_{j}")
    p = {}
    for i in range(1, delta + 1):
        p[i] = sysm.add_var(f"p_{i}", 0, n * delta // 2)
        sysm.add(stubs(i, i) - 2 * p[i], "==", 0, f"parity_{i}")

    if cls is GraphClass.CATERPILLAR:
        for lam in K.partitions:
            if _caterpillar_forbidden(lam):
                sysm.add(x[lam], "==", 0, f"caterpillar_{'_'.join(map(str, lam.parts))}")
    if cls in (GraphClass.TREE, GraphClass.CATERPILLAR) and inst.degree_sum != 2 * n - 2:
        sysm.add(LinExpr(), "==", 1, "tree_degree_sum")
    if cls is GraphClass.CONNECTED_SIMPLE and inst.degree_sum < 2 * (n - 1):
        sysm.add(LinExpr(), "==", 1, "connected_edge_count")

    if cls is GraphClass.LOOPLESS:
        if encoding is Encoding.PAPER:
            _paper_loopless(sysm, K, x, stubs, n)
        else:
            _semantic_loopless(sysm, K)
    elif cls in (GraphClass.SIMPLE, GraphClass.CONNECTED_SIMPLE):
        if encoding is Encoding.PAPER:
            _paper_simple(sysm, K, x, n)
        else:
            _semantic_simple(sysm, K)
    elif cls.acyclic:
        if encoding is Encoding.PAPER:
            _paper_forest(sysm, K, x, n)
        else:
            _semantic_forest(sysm, K)
    return sysm


# ---------------------------------------------------------------------------
# loopless multigraphs
# ---------------------------------------------------------------------------


def _paper_loopless(sysm, K, x, stubs, n):
    for i in range(1, K.delta + 1):
        terms = []
        for k in range(1, i + 1):
            members = [lam for lam in K.partitions if lam.height == i and lam.count(i) == k]
            q = sysm.add_var(f"q_{i}_{k}", 0, n)
            sysm.add(q - sum((x[lam] for lam in members), LinExpr()), "==", 0, f"q_{i}_{k}")
            m = encode_min(sysm, 1, q, n, f"lmin_{i}_{k}")
            terms.append(m * k)
        z = terms[0]
        for k in range(2, i + 1):
            z = encode_max(sysm, z, terms[k - 1], i, f"lmax_{i}_{k}")
        sysm.add(2 * z - stubs(i, i), "<=", 0, f"loopless_{i}")


def _semantic_loopless(sysm, K):
    for i in range(1, K.delta + 1):
        sel = np.flatnonzero(K.heights == i)
        col = K.N[sel, i - 1]

        def ok(vec, sel=sel, col=col):
            xs = vec[sel]
            present = col[xs > 0]
            if len(present) == 0:
                return True
            return 2 * int(present.max()) <= int(xs @ col)

        sysm.add_check(f"loopless_{i}", [sysm.x_names[s] for s in sel], ok)


# ---------------------------------------------------------------------------
# simple graphs
# ---------------------------------------------------------------------------


def _semantic_simple(sysm, K):
    delta = K.delta
    for i in range(1, delta + 1):
        sel = np.flatnonzero(K.heights == i)
        col = K.N[sel, i - 1]

        def eg(vec, sel=sel, col=col):
            seq = np.repeat(col, vec[sel])
            return seqcheck.check_erdos_gallai(seq.tolist(), k_limit=delta)

        sysm.add_check(f"eg_{i}", [sysm.x_names[s] for s in sel], eg)
    for i in range(1, delta + 1):
        for j in range(i + 1, delta + 1):
            sa = np.flatnonzero(K.heights == i)
            sb = np.flatnonzero(K.heights == j)
            ca = K.N[sa, j - 1]
            cb = K.N[sb, i - 1]

            def gr(vec, sa=sa, sb=sb, ca=ca, cb=cb):
                a = np.repeat(ca, vec[sa]).tolist()
                b = np.repeat(cb, vec[sb]).tolist()
                return seqcheck.check_gale_ryser(a, b, k_limit=max(delta - 1, 1))

            watch = [sysm.x_names[s] for s in np.r_[sa, sb]]
            sysm.add_check(f"gr_{i}_{j}", watch, gr)


def _dp_table(sysm, svars, k_max, tag, capped_literal=False):
    """Linear rows for ``t[l, k] = max_{k'} t[l-1, k-k'] + w(l, k) * min(k', s_l)``.

    ``w(l, k) = l`` for the plain table and ``min(l, k)`` for the literal capped
    recursion.  Returns ``t`` as a dict ``(l, k) -> LinExpr``.
    """
    L = len(svars)
    t = {(0, k): LinExpr() for k in range(k_max + 1)}
    for l in range(1, L + 1):
        t[(l, 0)] = LinExpr()
        mins = {}
        for kp in range(1, k_max + 1):
            s = svars[l - 1]
            mins[kp] = encode_min(sysm, kp, s, _diff_bound(sysm, kp, s), f"{tag}_m_{l}_{kp}")
        for k in range(1, k_max + 1):
            w = min(l, k) if capped_literal else l
            cands = [t[(l - 1, k)]] + [t[(l - 1, k - kp)] + mins[kp] * w for kp in range(1, k + 1)]
            z = cands[0]
            for c, cand in enumerate(cands[1:], start=1):
                M = _diff_bound(sysm, z, cand)
                z = encode_max(sysm, z, cand, M, f"{tag}_t_{l}_{k}_{c}")
            tv = sysm.add_var(f"{tag}_t_{l}_{k}", *_range(sysm, z))
            sysm.add(tv - z, "==", 0, f"{tag}_t_{l}_{k}")
            t[(l, k)] = tv
    return t


def _range(sysm, expr):
    from .system import expr_range

    return expr_range(sysm, LinExpr.of(expr))


def _diff_bound(sysm, a, b):
    lo, hi = _range(sysm, LinExpr.of(a) - LinExpr.of(b))
    return max(abs(lo), abs(hi), 1)


def _paper_simple(sysm, K, x, n):
    delta = K.delta

    def s_vars(i, j):
        out = []
        for l in range(1, i + 1):
            members = [lam for lam in K.partitions if lam.height == i and lam.count(j) == l]
            s = sysm.add_var(f"s_{i}_{j}_{l}", 0, n)
            sysm.add(s - sum((x[lam] for lam in members), LinExpr()), "==", 0, f"s_{i}_{j}_{l}")
            out.append(s)
        return out

    for i in range(1, delta + 1):
        for j in range(i + 1, delta + 1):
            sv = s_vars(i, j)
            t = _dp_table(sysm, sv, max(delta - 1, 1), f"gr_{i}_{j}")
            for k in range(1, delta):
                rhs = sum(
                    (x[lam] * min(k, lam.count(i)) for lam in K.partitions if lam.height == j),
                    LinExpr(),
                )
                sysm.add(t[(i, k)] - rhs, "<=", 0, f"gale_ryser_{i}_{j}_{k}")
    for i in range(1, delta + 1):
        sv = s_vars(i, i)
        t = _dp_table(sysm, sv, delta, f"eg_{i}")
        tt = _dp_table(sysm, sv, delta, f"egc_{i}", capped_literal=True)
        for k in range(1, delta + 1):
            total = sum(
                (x[lam] * min(k, lam.count(i)) for lam in K.partitions if lam.height == i),
                LinExpr(),
            )
            sysm.add(t[(i, k)] - total + tt[(i, k)], "<=", k * (k + 1), f"erdos_gallai_{i}_{k}")


# ---------------------------------------------------------------------------
# forests, trees, caterpillars
# ---------------------------------------------------------------------------


def _semantic_forest(sysm, K):
    for k in range(1, K.delta + 1):
        sel = np.flatnonzero(K.heights <= k)

        def ok(vec, k=k):
            return not K.forest_violations(vec[: len(K.partitions)], max_degree=k)

        sysm.add_check(f"forest_upto_{k}", [sysm.x_names[s] for s in sel], ok)
    if K.eager:
        fb = _ForestBounds(sysm, K)
        sysm.add_bound_check("forest_bounds", fb.ok)
        sysm.meta["relaxation_rows"] = fb.active_rows


class _ForestBounds:
    """Bound reasoning on the colour-set rows ``S - 2V <= -2`` (when ``S > 0``).

    Both sides are linear in x, so the smallest reachable value at a node is
    the fixed part plus, per (d, f) group, the undistributed amount times the
    cheapest member that can still grow.
    """

    def __init__(self, sysm, K):
        self.K = K
        self.P = len(K.partitions)
        hist = sysm.instance.histogram
        keys = sorted({(int(h), int(f)) for h, f in zip(K.heights, K.sizes)})
        self.gid = np.array([keys.index((int(h), int(f))) for h, f in zip(K.heights, K.sizes)])
        self.order = np.argsort(self.gid, kind="stable")
        g = self.gid[self.order]
        self.starts = np.flatnonzero(np.r_[True, g[1:] != g[:-1]])
        self.y = np.array([hist.get(k, 0) for k in keys], dtype=np.int64)
        self.A = K.DI - 2 * K.DI_pos
        self._cache = None

    def minima(self, lo, hi):
        """Lower bounds of S and of S - 2V for every colour set."""
        key = (lo.tobytes(), hi.tobytes())
        if self._cache is not None and self._cache[0] == key:
            return self._cache[1]
        lo, hi = lo[: self.P], hi[: self.P]
        rest = self.y - np.bincount(self.gid, weights=lo, minlength=len(self.y)).astype(np.int64)
        s = self.K.DI @ lo
        a = self.A @ lo
        # columns that can still grow, grouped, restricted to groups with something left
        cols = self.order[(lo < hi)[self.order] & (rest[self.gid[self.order]] > 0)]
        if len(cols):
            g = self.gid[cols]
            starts = np.flatnonzero(np.r_[True, g[1:] != g[:-1]])
            amount = rest[g[starts]]
            s = s + np.minimum.reduceat(self.K.DI[:, cols], starts, axis=1) @ amount
            a = a + np.minimum.reduceat(self.A[:, cols], starts, axis=1) @ amount
        self._cache = (key, (s, a))
        return s, a

    def ok(self, lo, hi) -> bool:
        s, a = self.minima(lo, hi)
        return not np.any((s > 0) & (a > -2))

    def active_rows(self, lo, hi):
        """Rows whose colour set surely carries stubs, as ``(A_x, b)``."""
        s, _ = self.minima(lo, hi)
        act = s > 0
        if not act.any():
            return None
        return self.A[act].astype(float), np.full(int(act.sum()), -2.0)


def _paper_forest(sysm, K, x, n):
    if not K.eager:
        # too many colour sets to tabulate: rows are generated on demand
        sysm.meta["separator"] = lambda assignment: _forest_cuts(sysm, K, x, n, assignment)
        return
    for mask, drow, prow in zip(K.subsets, K.DI, K.DI_pos):
        _add_forest_row(sysm, K, x, n, int(mask), drow, prow)


def _add_forest_row(sysm, K, x, n, mask, drow, prow):
    lhs = sum((x[lam] * int(d) for lam, d in zip(K.partitions, drow) if d), LinExpr())
    cover = sum((x[lam] for lam, pz in zip(K.partitions, prow) if pz), LinExpr())
    w = sysm.add_var(f"w_{mask}", 0, 1)
    # w = min(1, cover); the row only binds when the colour set has stubs
    sysm.add(cover - n * w, "<=", 0, f"forest_cover_{mask}")
    sysm.add(w - cover, "<=", 0, f"forest_nonempty_{mask}")
    sysm.add(lhs - 2 * cover + 2 * w, "<=", 0, f"forest_{mask}")


def _forest_cuts(sysm, K, x, n, assignment):
    vec = sysm.x_vector(assignment)
    added = 0
    for mask in K.forest_violations(vec):
        if f"w_{mask}" in sysm:
            continue
        bits = [c for c in range(len(K.colors)) if mask >> c & 1]
        drow = K.CD[:, bits].sum(axis=1)
        _add_forest_row(sysm, K, x, n, mask, drow, (drow > 0).astype(np.int64))
        added += 1
    return added
