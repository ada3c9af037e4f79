from collections import deque

import numpy as np
import pytest
from hypothesis import given

from conftest import C1_EDGES, COUNTEREXAMPLE_EDGES, simple_graphs, two_component_cyclic
from stubstar.assembler import (
    ContractError,
    _csr_of,
    _Work,
    construct,
    monochromatic_union,
    realize,
    swap_reduce,
    verify_realization,
)
from stubstar.feasibility import build_system, enumerate_all, solve_first, validate_ensemble
from stubstar.model import (
    Ensemble,
    GraphClass,
    LabeledGraph,
    Partition,
    ensemble_from_graph,
    instance_from_graph,
    instance_from_lists,
)
from stubstar.oracle import enumerate_trees, random_tree


def replay(g, trace):
    """Apply the recorded swaps one by one, checking the ensemble after each."""
    e = ensemble_from_graph(g)
    edges = set(g.edges)
    for s in trace.steps:
        assert s.f1 in edges and s.f2 in edges
        edges -= {s.f1, s.f2}
        edges |= {s.new1, s.new2}
        h = LabeledGraph(g.n_vertices, sorted(edges))
        assert ensemble_from_graph(h, e.delta) == e
        assert h.n_components() == s.components
    return LabeledGraph(g.n_vertices, sorted(edges))


# -- realize ----------------------------------------------------------------------


def test_realize_single_edge():
    g = realize(Ensemble({Partition([1]): 2}, 1), "tree")
    assert g.edges == ((0, 1),)


def test_realize_counterexample_simple():
    e = ensemble_from_graph(LabeledGraph(4, COUNTEREXAMPLE_EDGES))
    g = realize(e, "simple")
    assert g.is_simple() and ensemble_from_graph(g) == e
    # the realization is unique up to relabelling: one triangle plus a pendant edge
    assert sorted(g.degrees) == [1, 2, 2, 3] and g.n_edges == 4 and not g.is_acyclic()


def test_realize_c1_caterpillar(c1_graph):
    e = ensemble_from_graph(c1_graph)
    g = realize(e, "caterpillar")
    assert g.is_caterpillar() and g.n_edges == 7
    assert sorted(g.degrees) == sorted((1, 3, 1, 2, 3, 1, 2, 1))


def test_realize_precondition():
    e = ensemble_from_graph(LabeledGraph(4, COUNTEREXAMPLE_EDGES))
    with pytest.raises(ContractError):
        realize(e, "forest")


def test_construct_counterexample(counterexample):
    assert construct(counterexample, "tree") is None
    g = construct(counterexample, "simple")
    assert verify_realization(g, counterexample, "simple")
    assert set(g.edges) == {tuple(sorted(x)) for x in COUNTEREXAMPLE_EDGES}


def test_construct_c1(c1_graph):
    inst = instance_from_graph(c1_graph)
    g = construct(inst, "caterpillar")
    assert verify_realization(g, inst, "caterpillar") and g.n_edges == 7


# -- verify_realization ----------------------------------------------------------------


def test_verify_c1(c1_graph):
    assert verify_realization(c1_graph, instance_from_graph(c1_graph), "caterpillar")


def test_verify_spider_not_caterpillar():
    # centre 0 with three legs of length 2: three non-leaf neighbours
    spider = LabeledGraph(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
    rep = verify_realization(spider, instance_from_graph(spider), "caterpillar")
    assert not rep and any("path" in p for p in rep.problems)
    assert verify_realization(spider, instance_from_graph(spider), "tree")


def test_verify_triangle_not_tree():
    tri = LabeledGraph(3, [(0, 1), (1, 2), (0, 2)])
    rep = verify_realization(tri, instance_from_lists((2, 2, 2), (4, 4, 4)), "tree")
    assert not rep and "graph has a cycle" in rep.problems


def test_verify_wrong_sums():
    g = LabeledGraph(2, [(0, 1)])
    assert not verify_realization(g, instance_from_lists((1, 1, 2), (2, 2, 2)), "multigraph")


# -- swap_reduce ---------------------------------------------------------------------


def test_swap_reduce_rejects_acyclic():
    g = LabeledGraph(4, [(0, 1), (2, 3)])
    with pytest.raises(ContractError):
        swap_reduce(g)


def test_swap_reduce_rejects_connected():
    with pytest.raises(ContractError):
        swap_reduce(LabeledGraph(3, [(0, 1), (1, 2), (0, 2)]))


def test_swap_reduce_triangle_plus_component():
    # two triangles hanging off degree-3 vertices: same colours in both components
    g = LabeledGraph(
        8,
        [(0, 1), (1, 2), (0, 2), (2, 3), (4, 5), (5, 6), (4, 6), (6, 7)],
    )
    h, trace = swap_reduce(g)
    assert h.n_components() == 1
    assert ensemble_from_graph(h) == ensemble_from_graph(g)
    assert replay(g, trace).edges == h.edges
    assert "swap" in trace.to_text()


@pytest.mark.parametrize("seed", range(25))
def test_swap_reduce_random_two_component(seed):
    g = two_component_cyclic(7 + seed % 6, seed)
    assert g is not None
    e = ensemble_from_graph(g)
    assert validate_ensemble(e, "forest")
    h, trace = swap_reduce(g, e)
    assert h.n_components() < g.n_components()
    replay(g, trace)
    while not h.is_acyclic():
        h, _ = swap_reduce(h, e)
    assert h.is_tree()


def test_monochromatic_union_counterexample_realizes():
    e = ensemble_from_graph(LabeledGraph(4, COUNTEREXAMPLE_EDGES))
    g = monochromatic_union(e, GraphClass.SIMPLE)
    assert ensemble_from_graph(g) == e


# -- properties ------------------------------------------------------------------


def test_tree_endgame_exhaustive_n7():
    seen = set()
    for t in enumerate_trees(7, 4):
        e = ensemble_from_graph(t, 4)
        if e in seen:
            continue
        seen.add(e)
        g = realize(e, "tree")
        assert g.is_tree() and ensemble_from_graph(g, 4) == e


@given(simple_graphs(max_n=8))
def test_every_feasible_ensemble_realizes(g):
    inst = instance_from_graph(g)
    for cls in (GraphClass.SIMPLE, GraphClass.FOREST, GraphClass.TREE, GraphClass.CATERPILLAR):
        sysm = build_system(inst, cls)
        for a in enumerate_all(sysm, cap=20):
            e = sysm.ensemble(a)
            h = realize(e, cls)
            assert ensemble_from_graph(h, e.delta) == e
            if cls is GraphClass.CATERPILLAR:
                assert h.is_caterpillar()


def test_random_trees_construct():
    for s in range(20):
        t = random_tree(60, 4, s)
        inst = instance_from_graph(t)
        g = construct(inst, "tree")
        assert verify_realization(g, inst, "tree")


def _shortest_cycle_reference(w):
    """From-scratch search: BFS from every 2-core vertex, shortest wins, then smallest start."""
    deg = [len(a) for a in w.adj]
    alive = [True] * w.n
    stack = [v for v in range(w.n) if deg[v] < 2]
    while stack:
        v = stack.pop()
        if alive[v]:
            alive[v] = False
            for x in w.adj[v]:
                if alive[x]:
                    deg[x] -= 1
                    if deg[x] < 2:
                        stack.append(x)
    best = None
    for s in range(w.n):
        if not alive[s]:
            continue
        dist, par, branch, q, found = {s: 0}, {s: -1}, {s: -1}, deque([s]), None
        while q:
            u = q.popleft()
            limit = min(len(found) if found else 10**9, len(best) if best else 10**9)
            if 2 * dist[u] + 1 >= limit:
                break
            for x in sorted(w.adj[u]):
                if not alive[x] or x == par[u]:
                    continue
                if x in dist:
                    if branch[x] != branch[u] and u != s and x != s and dist[u] + dist[x] + 1 < limit:
                        pu, px = [u], [x]
                        while par[pu[-1]] != -1:
                            pu.append(par[pu[-1]])
                        while par[px[-1]] != -1:
                            px.append(par[px[-1]])
                        found = pu + px[-2::-1]
                        limit = len(found)
                    continue
                dist[x], par[x] = dist[u] + 1, u
                branch[x] = x if u == s else branch[u]
                q.append(x)
        if found is not None:
            best = found
    return best


@pytest.mark.parametrize("seed", range(12))
def test_cached_cycle_search_matches_fresh_search(seed, monkeypatch):
    # realize caches per-vertex cycle searches across swaps; every round must
    # still pick exactly what a from-scratch search picks
    calls = []
    original = _Work.shortest_cycle

    def checked(self):
        got = original(self)
        assert got == _shortest_cycle_reference(self)
        es, _ = self._edge_arrays()
        if self._matrix is not None:
            fresh = _csr_of(np.concatenate([es[:, 0], es[:, 1]]), np.concatenate([es[:, 1], es[:, 0]]), self.n)
            assert (self._matrix != fresh).nnz == 0
        calls.append(got)
        return got

    monkeypatch.setattr(_Work, "shortest_cycle", checked)
    g = random_tree([40, 120, 300][seed % 3], 4, 500 + seed)
    inst = instance_from_graph(g)
    sysm = build_system(inst, GraphClass.TREE)
    e = sysm.ensemble(solve_first(sysm))
    out = realize(e, GraphClass.TREE)
    assert out.is_connected() and len(out.edges) == out.n_vertices - 1
    assert calls
