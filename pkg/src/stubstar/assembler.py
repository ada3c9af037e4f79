"""Build a graph from a feasible ensemble.

Each colour (i, j) is realized on its own by a classical builder, the pieces
are glued on one vertex set (one vertex per stub-star, canonical order), and
for acyclic classes cycles are removed by degree-preserving swaps that merge
components.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, dijkstra

from . import seqcheck
from .feasibility.validate import validate_ensemble
from .model import (
    Ensemble,
    GraphClass,
    Instance,
    LabeledGraph,
    color_list,
    ensemble_from_graph,
)


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class SwapInvariantError(RuntimeError):
    """The swap construction hit a state its correctness argument rules out."""


class NotConnected(RuntimeError):
    """No connected realization was reached; ``graph`` is the best attempt."""

    def __init__(self, graph: LabeledGraph, message: str):
        super().__init__(message)
        self.graph = graph


Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class ColoredEdge:
    u: int
    v: int
    color: tuple[int, int]

    @classmethod
    def of(cls, g: LabeledGraph, u: int, v: int) -> "ColoredEdge":
        a, b = g.degrees[u], g.degrees[v]
        return cls(u, v, (min(a, b), max(a, b)))


@dataclass(frozen=True)
class SwapStep:
    f1: Edge
    f2: Edge
    new1: Edge
    new2: Edge
    components: int

    def __str__(self) -> str:
        (a, b), (c, d) = self.f1, self.f2
        (p, q), (r, s) = self.new1, self.new2
        return f"swap ({a},{b})({c},{d}) -> ({p},{q})({r},{s}) components={self.components}"


@dataclass
class SwapTrace:
    cycle: list[int] = field(default_factory=list)
    color_sets: list[list[tuple[int, int]]] = field(default_factory=list)
    labels: dict[Edge, tuple[Edge, Edge]] = field(default_factory=dict)
    steps: list[SwapStep] = field(default_factory=list)
    components_before: int = 0

    def to_text(self) -> str:
        lines = ["cycle " + " ".join(map(str, self.cycle))]
        for k, I in enumerate(self.color_sets):
            lines.append(f"I{k} " + " ".join(f"({i},{j})" for i, j in I))
        lines.extend(str(s) for s in self.steps)
        return "\n".join(lines)

    def extend(self, other: "SwapTrace") -> None:
        self.steps.extend(other.steps)


# ---------------------------------------------------------------------------
# mutable simple graph used by the swap machinery
# ---------------------------------------------------------------------------


def _csr_of(rows: np.ndarray, cols: np.ndarray, n: int) -> csr_matrix:
    """0/1 adjacency matrix built straight in CSR form (skips the COO pass)."""
    order = np.lexsort((cols, rows))
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return csr_matrix((np.ones(len(rows)), cols[order].astype(np.int32), indptr), shape=(n, n))


class _Work:
    def __init__(self, g: LabeledGraph):
        if not g.is_simple():
            raise ContractError("swap machinery needs a simple graph")
        self.n = g.n_vertices
        self.deg = list(g.degrees)
        self.adj = [set(a) for a in g.adjacency]
        self._arrays = None
        self._matrix = None
        self._comps = None
        self._sorted: dict[int, list[int]] = {}
        # per start vertex: (length, cycle) or (lower bound, None); see shortest_cycle
        self._cyc: dict[int, tuple[float, list[int] | None]] = {}
        self._touched: set[int] = set()

    def nbrs(self, v: int) -> list[int]:
        """Neighbours of ``v`` in increasing order (cached between swaps)."""
        out = self._sorted.get(v)
        if out is None:
            out = self._sorted[v] = sorted(self.adj[v])
        return out

    def color(self, e: Edge) -> tuple[int, int]:
        a, b = self.deg[e[0]], self.deg[e[1]]
        return (a, b) if a <= b else (b, a)

    def edges(self) -> list[Edge]:
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    def labels(self, v: int) -> list[int]:
        return sorted(self.deg[w] for w in self.adj[v])

    def n_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def has(self, e: Edge) -> bool:
        return e[1] in self.adj[e[0]]

    def _edge_arrays(self):
        """Edge endpoints and colour codes; rows are updated in place by swaps."""
        if self._arrays is None:
            es = np.array(self.edges(), dtype=np.int64).reshape(-1, 2)
            d = np.array(self.deg, dtype=np.int64)
            a, b = d[es[:, 0]], d[es[:, 1]]
            code = np.minimum(a, b) * (self.n + 1) + np.maximum(a, b)
            self._arrays = (es, code)
            self._row = {(int(u), int(v)): k for k, (u, v) in enumerate(es.tolist())}
        return self._arrays

    def color_mask(self, allowed) -> np.ndarray:
        """Per edge of ``_edge_arrays``: is its colour in ``allowed``."""
        es, code = self._edge_arrays()
        keys = np.array([i * (self.n + 1) + j for i, j in allowed], dtype=np.int64)
        return np.isin(code, keys)

    def comp_ids(self, allowed=None) -> np.ndarray:
        """Component id per vertex, over edges whose colour is in ``allowed``."""
        if allowed is None:
            if self._comps is None:
                # the adjacency matrix is symmetric, so weak components are the components
                self._comps = connected_components(self._csr(), connection="weak")[1]
            return self._comps
        es, _ = self._edge_arrays()
        es = es[self.color_mask(allowed)]
        return connected_components(_csr_of(es[:, 0], es[:, 1], self.n), directed=False)[1]

    def n_components(self) -> int:
        return int(self.comp_ids().max(initial=-1)) + 1

    def graph(self) -> LabeledGraph:
        return LabeledGraph(self.n, self.edges())

    def shortest_cycle(self) -> list[int] | None:
        """Vertices of a shortest cycle; ties go to the smallest start vertex."""
        # only vertices of the 2-core can lie on a cycle; peel the components
        # that have one (swaps keep every degree, so self.deg stays exact)
        cid = self.comp_ids()
        es, _ = self._edge_arrays()
        cyclic = np.bincount(cid[es[:, 0]], minlength=cid.max(initial=-1) + 1) >= np.bincount(cid)
        alive = cyclic[cid].tolist()
        deg = list(self.deg)
        stack = [v for v in range(self.n) if alive[v] and deg[v] < 2]
        while stack:
            v = stack.pop()
            if not alive[v]:
                continue
            alive[v] = False
            for w in self.adj[v]:
                if alive[w]:
                    deg[w] -= 1
                    if deg[w] < 2:
                        stack.append(w)
        self._expire_cycles()
        best = None
        for s in [v for v in range(self.n) if alive[v]]:
            limit = len(best) if best else None
            hit = self._cyc.get(s)
            if hit is not None and (hit[1] is not None or (limit is not None and hit[0] >= limit)
                                    or (limit is None and hit[0] == np.inf)):
                cyc = hit[1]
            else:
                cyc = self._cycle_through(s, limit, alive)
                self._cyc[s] = (len(cyc), cyc) if cyc else (limit or np.inf, None)
            if cyc is not None and (best is None or len(cyc) < len(best)):
                best = cyc
                if len(best) == 3:
                    break
        return None if best is None else list(best)

    def _expire_cycles(self):
        """Drop cached searches whose explored ball reached a swapped vertex.

        A search from s that stops at length c expands only vertices within
        distance (c-1)/2 of s, and a swap changes adjacency only at its endpoints.
        """
        if not self._touched or not self._cyc:
            self._touched.clear()
            return
        d = dijkstra(self._csr(), indices=sorted(self._touched), unweighted=True, min_only=True)
        self._touched.clear()
        keys = np.fromiter(self._cyc, dtype=np.int64, count=len(self._cyc))
        vals = np.fromiter((v[0] for v in self._cyc.values()), dtype=float, count=len(keys))
        # "not >=" also drops an unbounded search in a touched component
        for s in keys[~(2 * d[keys] > vals)].tolist():
            del self._cyc[s]

    def _cycle_through(self, s, limit, alive=None):
        """Shortest cycle through ``s`` by BFS, or None; ``limit`` bounds its length.

        Vertices outside the 2-core (``alive`` false) lie on no cycle, so
        skipping them leaves the result unchanged.
        """
        nbrs = self.nbrs
        dist = {s: 0}
        par = {s: -1}
        branch = {s: -1}
        q = deque([s])
        best = None
        while q:
            u = q.popleft()
            du = dist[u]
            if limit is not None and 2 * du + 1 >= limit:
                break
            if best is not None and 2 * du + 1 >= len(best):
                break
            pu_, bu = par[u], branch[u]
            for w in nbrs(u):
                if w == pu_ or (alive is not None and not alive[w]):
                    continue
                dw = dist.get(w)
                if dw is not None:
                    # a cross edge between different first steps closes a cycle through s
                    if branch[w] != bu and u != s and w != s:
                        length = du + dw + 1
                        if (limit is None or length < limit) and (best is None or length < len(best)):
                            pu, pw = [u], [w]
                            while par[pu[-1]] != -1:
                                pu.append(par[pu[-1]])
                            while par[pw[-1]] != -1:
                                pw.append(par[pw[-1]])
                            best = pu + pw[-2::-1]
                    continue
                dist[w] = du + 1
                par[w] = u
                branch[w] = w if u == s else bu
                q.append(w)
        return best

    def _csr(self):
        if self._matrix is None:
            es, _ = self._edge_arrays()
            self._matrix = _csr_of(np.concatenate([es[:, 0], es[:, 1]]),
                                   np.concatenate([es[:, 1], es[:, 0]]), self.n)
        return self._matrix

    def path(self, sources: set[int], targets: set[int]) -> list[Edge]:
        """Edges of a shortest path from any source to any target vertex.

        One BFS per source (there are two); ties go to the smaller target,
        then the smaller source.
        """
        best = None
        for s in sorted(sources):
            # the matrix is symmetric, so the directed search is the cheap one
            _, pred = breadth_first_order(self._csr(), s, directed=True, return_predecessors=True)
            pred = pred.tolist()
            for t in sorted(targets):
                if t != s and pred[t] < 0:
                    continue
                chain = [t]
                while chain[-1] != s:
                    chain.append(pred[chain[-1]])
                key = (len(chain), t, s)
                if best is None or key < best[0]:
                    best = (key, chain[::-1])
        if best is None:
            raise SwapInvariantError("no path between edges that share a component")
        chain = best[1]
        return [_norm(u, v) for u, v in zip(chain, chain[1:])]

    def swap(self, f1: Edge, f2: Edge) -> tuple[Edge, Edge]:
        """Replace f1=(v1,v2), f2=(v3,v4) by (v1,v3), (v2,v4) with deg v2 = deg v3."""
        for v1, v2 in (f1, f1[::-1]):
            for v3, v4 in (f2, f2[::-1]):
                if self.deg[v2] != self.deg[v3] or self.deg[v1] != self.deg[v4]:
                    continue
                if v3 in self.adj[v1] or v4 in self.adj[v2] or v1 == v3 or v2 == v4:
                    continue
                touched = (v1, v2, v3, v4)
                before = [self.labels(v) for v in touched]
                for a, b in (f1, f2):
                    self.adj[a].discard(b)
                    self.adj[b].discard(a)
                self.adj[v1].add(v3)
                self.adj[v3].add(v1)
                self.adj[v2].add(v4)
                self.adj[v4].add(v2)
                if self._arrays is not None:
                    # a degree-matched swap keeps both colours, so the codes stay valid
                    es = self._arrays[0]
                    for old_e, new_e in ((f1, _norm(v1, v3)), (f2, _norm(v2, v4))):
                        k = self._row.pop(_norm(*old_e))
                        es[k] = new_e
                        self._row[new_e] = k
                if self._matrix is not None:
                    m = self._matrix
                    for row, old, new in ((v1, v2, v3), (v2, v1, v4), (v3, v4, v1), (v4, v3, v2)):
                        nb = m.indices[m.indptr[row]:m.indptr[row + 1]]
                        nb[nb == old] = new
                        nb.sort()
                self._comps = None
                for v in touched:
                    self._sorted.pop(v, None)
                self._touched.update(touched)
                # only these four stub-stars can change; the rest of the ensemble is untouched
                if [self.labels(v) for v in touched] != before:
                    raise SwapInvariantError(f"swap of {f1} and {f2} changed a stub-star")
                return _norm(v1, v3), _norm(v2, v4)
        raise SwapInvariantError(f"no degree-matched orientation for {f1} and {f2}")


# ---------------------------------------------------------------------------
# swap reduction
# ---------------------------------------------------------------------------


def swap_reduce(g: LabeledGraph, e: Ensemble | None = None) -> tuple[LabeledGraph, SwapTrace]:
    """One round of component reduction: returns a realization of the same
    ensemble with strictly fewer components, and the trace of how it got there.

    Needs a simple graph with a cycle and at least two components.
    """
    if e is None:
        e = ensemble_from_graph(g)
    elif ensemble_from_graph(g, e.delta) != e:
        raise ContractError("graph does not realize the ensemble")
    w = _Work(g)
    trace = _reduce_once(w)
    out = w.graph()
    if ensemble_from_graph(out, e.delta) != e:
        raise SwapInvariantError("swap round changed the ensemble")
    return out, trace


def _reduce_once(w: _Work, components: int | None = None) -> SwapTrace:
    if components is None:
        components = w.n_components()
    trace = SwapTrace(components_before=components)
    if trace.components_before < 2:
        raise ContractError("graph has a single component")
    cycle = w.shortest_cycle()
    if cycle is None:
        raise ContractError("graph is acyclic")
    trace.cycle = cycle
    cyc_edges = sorted(_norm(a, b) for a, b in zip(cycle, cycle[1:] + cycle[:1]))
    anchored = {x: None for x in cyc_edges}  # edge -> label (None on the cycle)
    by_color: dict[tuple[int, int], list[Edge]] = {}
    for x in cyc_edges:
        by_color.setdefault(w.color(x), []).append(x)
    I = sorted({w.color(x) for x in cyc_edges})
    trace.color_sets.append(list(I))
    gcomp = w.comp_ids()
    home = gcomp[cycle[0]]
    es, _ = w._edge_arrays()
    order = np.lexsort((es[:, 1], es[:, 0]))
    es = es[order]
    outside = gcomp[es[:, 0]] != home

    while True:
        Iset = set(I)
        hcomp = w.comp_ids(Iset)
        core = hcomp[cycle[0]]
        inI = w.color_mask(Iset)[order]
        # stop once some edge of a colour in I lies outside the cycle's component of G
        far = [tuple(x) for x in es[inI & outside].tolist()]
        if far:
            break
        # one path per other component of H_i, from a same-coloured anchored edge
        others: dict[int, list[Edge]] = {}
        for x in map(tuple, es[inI & (hcomp[es[:, 0]] != core)].tolist()):
            others.setdefault(int(hcomp[x[0]]), []).append(x)
        new_colors = set()
        for cid in sorted(others, key=lambda c: others[c][0]):
            pair = None
            for e2 in others[cid]:
                cands = [x for x in by_color.get(w.color(e2), ()) if hcomp[x[0]] == core]
                if cands:
                    pair = (min(cands), e2)
                    break
            if pair is None:
                raise SwapInvariantError("component of H shares no colour with anchored edges")
            e1, e2 = pair
            for f in w.path(set(e1), set(e2)):
                col = w.color(f)
                if col in Iset:
                    continue
                new_colors.add(col)
                if f not in anchored:
                    anchored[f] = pair
                    by_color.setdefault(col, []).append(f)
                    trace.labels[f] = pair
        if not new_colors:
            raise SwapInvariantError("colour set stopped growing before reaching another component")
        I = sorted(Iset | new_colors)
        trace.color_sets.append(list(I))

    # Iset, hcomp and core still describe the final colour set
    first_far: dict[tuple[int, int], Edge] = {}
    for f2 in far:
        first_far.setdefault(w.color(f2), f2)
    pairs = [(f1, first_far[w.color(f1)]) for f1 in sorted(anchored)
             if hcomp[f1[0]] == core and w.color(f1) in first_far]
    if not pairs:
        raise SwapInvariantError("no same-coloured anchored edge to swap across components")
    f1, f2 = pairs[0]
    before = trace.components_before
    while True:
        new1, new2 = w.swap(f1, f2)
        cid = w.comp_ids()
        now = int(cid.max()) + 1
        trace.steps.append(SwapStep(f1, f2, new1, new2, now))
        if now < before:
            return trace
        if now > before:
            raise SwapInvariantError("swap increased the number of components")
        label = anchored.get(f1)
        if label is None:
            raise SwapInvariantError(f"swap on cycle edge {f1} did not merge components")
        f1, f2 = label
        if not (w.has(f1) and w.has(f2)):
            raise SwapInvariantError("labelled edges were removed by an earlier swap")
        if cid[f1[0]] == cid[f2[0]]:
            raise SwapInvariantError(f"{f1} and {f2} still share a component after the swap")


# ---------------------------------------------------------------------------
# realization
# ---------------------------------------------------------------------------


def _vertex_groups(e: Ensemble):
    stars = e.stars()
    by_deg: dict[int, list[int]] = {}
    for v, s in enumerate(stars):
        by_deg.setdefault(s.height, []).append(v)
    return stars, by_deg


def monochromatic_union(e: Ensemble, cls: GraphClass) -> LabeledGraph:
    """Union of one realization per colour on the shared vertex set."""
    cls = GraphClass(cls)
    stars, by_deg = _vertex_groups(e)
    edges: list[Edge] = []
    for i, j in color_list(e.delta):
        if i not in by_deg or (j not in by_deg):
            continue
        if i == j:
            vs = by_deg[i]
            seq = [stars[v].count(i) for v in vs]
            if not any(seq):
                continue
            if cls is GraphClass.MULTIGRAPH:
                part = seqcheck.build_multigraph(seq)
            elif cls is GraphClass.LOOPLESS:
                part = seqcheck.build_loopless(seq)
            elif cls.acyclic:
                part = seqcheck.build_forest(seq)
            else:
                part = seqcheck.build_havel_hakimi(seq)
            edges.extend((vs[a], vs[b]) for a, b in part.edges)
        else:
            va, vb = by_deg[i], by_deg[j]
            a = [stars[v].count(j) for v in va]
            b = [stars[v].count(i) for v in vb]
            if not any(a):
                continue
            multi = cls in (GraphClass.MULTIGRAPH, GraphClass.LOOPLESS)
            part = seqcheck.build_bipartite(a, b, multi=multi)
            p = len(va)
            edges.extend((va[x], vb[y - p]) for x, y in part.edges)
    g = LabeledGraph(len(stars), edges)
    if cls not in (GraphClass.MULTIGRAPH, GraphClass.LOOPLESS) and not g.is_simple():
        raise SwapInvariantError("union of simple colour classes has parallel edges")
    return g


def realize(e: Ensemble, cls: GraphClass | str, trace: SwapTrace | None = None) -> LabeledGraph:
    """A graph of class ``cls`` whose stub-star ensemble is ``e``.

    Vertex ``v`` carries the ``v``-th stub-star of ``e.stars()``.  For the
    connected class a ``NotConnected`` error carries the best graph found.
    """
    cls = GraphClass(cls)
    report = validate_ensemble(e, cls)
    if not report:
        raise ContractError("ensemble is not realizable: " + "; ".join(report.violations))
    g = monochromatic_union(e, cls)
    if cls.acyclic:
        w = _Work(g)
        start = comps = w.n_components()
        m = w.n_edges()  # swaps keep the edge count
        rounds = 0
        while m != w.n - comps:
            t = _reduce_once(w, comps)
            comps = t.steps[-1].components
            rounds += 1
            if trace is not None:
                trace.extend(t)
            if rounds > start:
                raise SwapInvariantError("reduction did not terminate")
        g = w.graph()
        if cls in (GraphClass.TREE, GraphClass.CATERPILLAR) and not g.is_connected():
            raise SwapInvariantError("acyclic realization with 2n-2 degree sum is not connected")
        if cls is GraphClass.CATERPILLAR and not g.is_caterpillar():
            raise SwapInvariantError("tree realization of a caterpillar ensemble is not a caterpillar")
    elif cls is GraphClass.CONNECTED_SIMPLE:
        w = _Work(g)
        while w.n_components() > 1:
            if w.n_edges() == w.n - w.n_components():
                raise NotConnected(w.graph(), "no component has a cycle left to open")
            try:
                t = _reduce_once(w)
            except SwapInvariantError as exc:
                raise NotConnected(w.graph(), f"swap reduction stuck: {exc}") from exc
            if trace is not None:
                trace.extend(t)
        g = w.graph()
    if ensemble_from_graph(g, e.delta) != e:
        raise SwapInvariantError("realization does not carry the requested ensemble")
    return g


def align_to_instance(g: LabeledGraph, e: Ensemble, inst: Instance) -> LabeledGraph:
    """Relabel a realization of ``e`` so vertex k matches ``(D[k], F[k])``."""
    slots: dict[tuple[int, int], list[int]] = {}
    for k, (d, f) in enumerate(zip(inst.d_list, inst.f_list)):
        slots.setdefault((d, f), []).append(k)
    mapping = []
    for s in e.stars():
        bucket = slots.get((s.height, s.size))
        if not bucket:
            raise ContractError(f"ensemble star {s!r} has no matching instance vertex")
        mapping.append(bucket.pop(0))
    if any(slots.values()):
        raise ContractError("ensemble and instance have different sizes")
    return g.relabel(mapping)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class VerifyReport:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def class_problems(g: LabeledGraph, cls: GraphClass) -> list[str]:
    cls = GraphClass(cls)
    out = []
    if cls is not GraphClass.MULTIGRAPH and g.has_loops():
        out.append("graph has loops")
    if cls not in (GraphClass.MULTIGRAPH, GraphClass.LOOPLESS) and g.has_multi_edges():
        out.append("graph has parallel edges")
    if cls.acyclic and not g.is_acyclic():
        out.append("graph has a cycle")
    if cls in (GraphClass.TREE, GraphClass.CATERPILLAR, GraphClass.CONNECTED_SIMPLE) and not g.is_connected():
        out.append(f"graph has {g.n_components()} components")
    if cls is GraphClass.CATERPILLAR and g.is_tree() and not g.is_caterpillar():
        out.append("non-leaf vertices do not form a path")
    return out


def verify_realization(g: LabeledGraph, inst: Instance, cls: GraphClass | str) -> VerifyReport:
    problems = []
    if g.n_vertices != inst.n:
        problems.append(f"graph has {g.n_vertices} vertices, instance has {inst.n}")
    else:
        deg, nsum = g.degrees, g.neighbor_sums()
        for k in range(inst.n):
            if deg[k] != inst.d_list[k]:
                problems.append(f"vertex {k}: degree {deg[k]} != {inst.d_list[k]}")
            if nsum[k] != inst.f_list[k]:
                problems.append(f"vertex {k}: neighbour degree sum {nsum[k]} != {inst.f_list[k]}")
    problems.extend(class_problems(g, cls))
    return VerifyReport(not problems, problems)


def construct(inst: Instance, cls: GraphClass | str, encoding: str = "semantic") -> LabeledGraph | None:
    """Decide, realize and align: a verified graph for ``inst`` or ``None``."""
    from .feasibility import build_system, solve_first

    cls = GraphClass(cls)
    sysm = build_system(inst, cls, encoding)
    sol = solve_first(sysm)
    if sol is None:
        return None
    e = sysm.ensemble(sol)
    g = align_to_instance(realize(e, cls), e, inst)
    report = verify_realization(g, inst, cls)
    if not report:
        raise SwapInvariantError("constructed graph failed verification: " + "; ".join(report.problems))
    return g
