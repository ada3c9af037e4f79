import itertools

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from stubstar.model import LabeledGraph, instance_from_lists

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# the four-vertex graph with a unique realization (0-based: 1-2,1-4,2-4,4-3)
COUNTEREXAMPLE_EDGES = [(0, 1), (0, 3), (1, 3), (3, 2)]
# caterpillar C1 (0-based: 1-2,2-3,2-4,4-5,5-6,5-7,7-8)
C1_EDGES = [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6), (6, 7)]


@pytest.fixture
def counterexample():
    return instance_from_lists((2, 2, 1, 3), (5, 5, 3, 5))


@pytest.fixture
def c1_graph():
    return LabeledGraph(8, C1_EDGES)


@st.composite
def simple_graphs(draw, max_n=8, max_degree=4, min_n=1):
    """Random simple graphs with bounded degree and no isolated vertices."""
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    deg = [0] * n
    edges = []
    for u, v in chosen:
        if deg[u] < max_degree and deg[v] < max_degree:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    keep = [v for v in range(n) if deg[v] > 0]
    if not keep:
        return LabeledGraph(2, [(0, 1)])
    idx = {v: k for k, v in enumerate(keep)}
    return LabeledGraph(len(keep), [(idx[u], idx[v]) for u, v in edges])


@st.composite
def multigraphs(draw, max_n=6, max_degree=4):
    """Random multigraphs with loops, bounded degree, no isolated vertices."""
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=3 * n))
    deg = [0] * n
    edges = []
    for u, v in chosen:
        add = 2 if u == v else 1
        if deg[u] + add <= max_degree and deg[v] + add <= max_degree:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    keep = [v for v in range(n) if deg[v] > 0]
    if not keep:
        return LabeledGraph(2, [(0, 1)])
    idx = {v: k for k, v in enumerate(keep)}
    return LabeledGraph(len(keep), [(idx[u], idx[v]) for u, v in edges])


def jdm_swap_walk(g, rng, steps=200):
    """Random walk by swaps (a,b),(c,d) -> (a,d),(c,b) with deg a == deg c
    and deg b == deg d.

    Each swap keeps every vertex's degree and neighbour-degree multiset, so
    the stub-star ensemble is fixed; yields each simple graph visited.
    """
    deg = g.degrees
    edges = [tuple(e) for e in g.edges]
    present = set(edges)
    for _ in range(steps):
        i, j = rng.choice(len(edges), size=2, replace=False)
        (a, b), (c, d) = edges[i], edges[j]
        if rng.random() < 0.5:
            a, b = b, a
        if rng.random() < 0.5:
            c, d = d, c
        if deg[a] != deg[c] or deg[b] != deg[d] or len({a, b, c, d}) < 4:
            continue
        n1, n2 = (min(a, d), max(a, d)), (min(c, b), max(c, b))
        if n1 in present or n2 in present:
            continue
        present -= {edges[i], edges[j]}
        present |= {n1, n2}
        edges[i], edges[j] = n1, n2
        yield LabeledGraph(g.n_vertices, edges)


def two_component_cyclic(n, seed, max_tries=300):
    """A simple graph with exactly two components and a cycle whose ensemble
    is that of a random tree on n vertices (so it is forest-valid)."""
    import numpy as np

    from stubstar.oracle import random_tree

    rng = np.random.default_rng(seed)
    for t in range(max_tries):
        tree = random_tree(n, 4, seed * 1000 + t)
        for g in jdm_swap_walk(tree, rng, 400):
            if g.n_components() == 2 and not g.is_acyclic():
                return g
    return None
