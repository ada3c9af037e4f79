"""Brute-force ground truth and the recursive random-tree generator.

Everything here is deliberately independent of the feasibility systems: trees
come from Pruefer codes, small graphs from a direct edge search constrained by
D and F, and realizations are compared through their (D, F) data only.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from typing import Iterator, Sequence

import numpy as np

from .model import (
    BoundError,
    Ensemble,
    GraphClass,
    Instance,
    LabeledGraph,
    ensemble_from_graph,
)

MAX_TREE_N = 10
MAX_GRAPH_N = 8


# ---------------------------------------------------------------------------
# random trees
# ---------------------------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 64) - 1)))


def random_tree(n: int, k: int = 4, seed: int = 0) -> LabeledGraph:
    """Random tree on ``n`` vertices with maximum degree ``k``.

    Each vertex draws its number of children uniformly from ``1..k-1`` (the
    root from ``1..k``), redrawing while it exceeds the vertices left for its
    subtree, then splits those vertices into an ordered tuple of positive
    subtree sizes uniformly (stars and bars).
    """
    if n < 1:
        raise BoundError("n must be positive")
    if k < 2:
        raise BoundError("k must be at least 2")
    rng = _rng(seed)
    edges = []
    next_id = 1
    stack = [(0, n, True)]
    while stack:
        v, size, is_root = stack.pop()
        rest = size - 1
        if rest == 0:
            continue
        top = k if is_root else k - 1
        while True:
            d = int(rng.integers(1, top + 1))
            if d <= rest:
                break
        cuts = np.sort(rng.choice(np.arange(1, rest), size=d - 1, replace=False)) if d > 1 else []
        bounds = [0, *map(int, cuts), rest]
        for a, b in zip(bounds, bounds[1:]):
            child = next_id
            next_id += 1
            edges.append((v, child))
            stack.append((child, b - a, False))
    return LabeledGraph(n, edges)


# ---------------------------------------------------------------------------
# Pruefer codes and tree enumeration
# ---------------------------------------------------------------------------


def prufer_decode(code: Sequence[int], n: int | None = None) -> LabeledGraph:
    if n is None:
        n = len(code) + 2
    if n == 1:
        return LabeledGraph(1, [])
    if len(code) != n - 2:
        raise ValueError(f"code of length {len(code)} does not describe a tree on {n} vertices")
    degree = [1] * n
    for v in code:
        degree[v] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in code:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    w = heapq.heappop(leaves)
    edges.append((u, w))
    return LabeledGraph(n, edges)


def prufer_encode(tree: LabeledGraph) -> tuple[int, ...]:
    import heapq

    n = tree.n_vertices
    if n <= 2:
        return ()
    adj = [set(a) for a in tree.adjacency]
    leaves = [v for v in range(n) if len(adj[v]) == 1]
    heapq.heapify(leaves)
    code = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        (nb,) = adj[leaf]
        code.append(nb)
        adj[nb].discard(leaf)
        adj[leaf].clear()
        if len(adj[nb]) == 1:
            heapq.heappush(leaves, nb)
    return tuple(code)


def enumerate_trees(n: int, delta: int | None = None) -> Iterator[LabeledGraph]:
    """All labelled trees on ``n`` vertices with maximum degree <= ``delta``."""
    if n > MAX_TREE_N:
        raise BoundError(f"tree enumeration is limited to n <= {MAX_TREE_N}")
    if n == 1:
        yield LabeledGraph(1, [])
        return
    for code in itertools.product(range(n), repeat=n - 2):
        if delta is not None and max(Counter(code).values(), default=0) + 1 > delta:
            continue
        yield prufer_decode(code, n)


def trees_with_degrees(degrees: Sequence[int]) -> Iterator[LabeledGraph]:
    """Labelled trees with the exact degree sequence (Pruefer multiset permutations)."""
    n = len(degrees)
    if n == 1:
        if degrees[0] == 0:
            yield LabeledGraph(1, [])
        return
    if sum(degrees) != 2 * n - 2 or min(degrees) < 1:
        return
    pool = Counter({v: d - 1 for v, d in enumerate(degrees) if d > 1})
    for code in _multiset_permutations(pool, n - 2):
        yield prufer_decode(code, n)


def _multiset_permutations(pool: Counter, length: int):
    keys = sorted(pool)
    cur: list[int] = []

    def rec():
        if len(cur) == length:
            yield tuple(cur)
            return
        for k in keys:
            if pool[k]:
                pool[k] -= 1
                cur.append(k)
                yield from rec()
                cur.pop()
                pool[k] += 1

    yield from rec()


# ---------------------------------------------------------------------------
# canonical forms
# ---------------------------------------------------------------------------


def tree_centers(tree: LabeledGraph) -> list[int]:
    n = tree.n_vertices
    if n <= 2:
        return list(range(n))
    deg = list(tree.degrees)
    adj = tree.adjacency
    layer = [v for v in range(n) if deg[v] <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def _rooted_code(adj, root, parent) -> str:
    kids = sorted(_rooted_code(adj, c, root) for c in adj[root] if c != parent)
    return "(" + "".join(kids) + ")"


def canonical_tree_form(tree: LabeledGraph) -> str:
    """Isomorphism-invariant string of an unlabelled tree (rooted at its centre)."""
    adj = tree.adjacency
    return min(_rooted_code(adj, c, -1) for c in tree_centers(tree))


def canonical_graph_form(g: LabeledGraph) -> tuple:
    """Canonical edge multiset by exhaustive relabelling within degree classes."""
    n = g.n_vertices
    if n > MAX_GRAPH_N:
        raise BoundError(f"graph canonicalisation is limited to n <= {MAX_GRAPH_N}")
    key = list(zip(g.degrees, g.neighbor_sums()))
    order = sorted(range(n), key=lambda v: key[v])
    groups = [list(grp) for _, grp in itertools.groupby(order, key=lambda v: key[v])]
    best = None
    for perms in itertools.product(*(itertools.permutations(gp) for gp in groups)):
        mapping = [0] * n
        pos = 0
        for perm in perms:
            for v in perm:
                mapping[v] = pos
                pos += 1
        form = tuple(sorted(tuple(sorted((mapping[u], mapping[v]))) for u, v in g.edges))
        if best is None or form < best:
            best = form
    return tuple(sorted(key)), best


# ---------------------------------------------------------------------------
# brute-force realization search
# ---------------------------------------------------------------------------


class Mode(str, enum.Enum):
    EXISTS = "exists"
    COUNT_ENSEMBLES = "count_ensembles"
    COUNT_UNLABELED = "count_unlabeled"


def realizations(inst: Instance, cls: GraphClass) -> Iterator[LabeledGraph]:
    """Every labelled graph of class ``cls`` realizing ``inst`` (vertex order kept)."""
    cls = GraphClass(cls)
    n = inst.n
    D, F = inst.d_list, inst.f_list
    if cls in (GraphClass.TREE, GraphClass.CATERPILLAR):
        if n > MAX_TREE_N:
            raise BoundError(f"tree brute force is limited to n <= {MAX_TREE_N}")
        for t in trees_with_degrees(D):
            if t.neighbor_sums() == F and (cls is GraphClass.TREE or t.is_caterpillar()):
                yield t
        return
    if n > MAX_GRAPH_N:
        raise BoundError(f"graph brute force is limited to n <= {MAX_GRAPH_N}")
    if sum(D) % 2:
        return
    loops = cls is GraphClass.MULTIGRAPH
    multi = cls in (GraphClass.MULTIGRAPH, GraphClass.LOOPLESS)
    acyclic = cls is GraphClass.FOREST
    rem_d = list(D)
    rem_f = list(F)
    edges: list[tuple[int, int]] = []
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    def feasible(v):
        r = rem_d[v]
        return r * 1 <= rem_f[v] <= r * max(D) if r else rem_f[v] == 0

    def rec(u):
        while u < n and rem_d[u] == 0:
            if rem_f[u] != 0:
                return
            u += 1
        if u == n:
            g = LabeledGraph(n, edges)
            if cls is GraphClass.CONNECTED_SIMPLE and not g.is_connected():
                return
            yield g
            return
        # next edge at u goes to w >= last partner (canonical edge order)
        last = edges[-1][1] if edges and edges[-1][0] == u else u
        start = last if multi else last + 1
        if not (edges and edges[-1][0] == u) and not loops:
            start = u + 1
        for w in range(start, n):
            if w == u:
                if not loops or rem_d[u] < 2 or rem_f[u] < 2 * D[u]:
                    continue
                rem_d[u] -= 2
                rem_f[u] -= 2 * D[u]
                edges.append((u, u))
                if feasible(u):
                    yield from rec(u)
                edges.pop()
                rem_d[u] += 2
                rem_f[u] += 2 * D[u]
                continue
            if rem_d[w] == 0 or rem_f[u] < D[w] or rem_f[w] < D[u]:
                continue
            if not multi and edges and (u, w) == edges[-1]:
                continue
            if acyclic:
                ru, rw = find(u), find(w)
                if ru == rw:
                    continue
                parent[ru] = rw
            rem_d[u] -= 1
            rem_d[w] -= 1
            rem_f[u] -= D[w]
            rem_f[w] -= D[u]
            edges.append((u, w))
            if feasible(u) and feasible(w):
                yield from rec(u)
            edges.pop()
            rem_d[u] += 1
            rem_d[w] += 1
            rem_f[u] += D[w]
            rem_f[w] += D[u]
            if acyclic:
                parent[ru] = ru

    yield from rec(0)


def brute_force(inst: Instance, cls: GraphClass, mode: Mode | str = Mode.EXISTS):
    cls = GraphClass(cls)
    mode = Mode(mode)
    gen = realizations(inst, cls)
    if mode is Mode.EXISTS:
        return next(gen, None) is not None
    if mode is Mode.COUNT_ENSEMBLES:
        return len({ensemble_from_graph(g, inst.delta) for g in gen})
    if cls.acyclic and cls is not GraphClass.FOREST:
        return len({canonical_tree_form(g) for g in gen})
    return len({canonical_graph_form(g) for g in gen})
