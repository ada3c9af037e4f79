import itertools
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stubstar import seqcheck
from stubstar.model import LabeledGraph
from stubstar.seqcheck import (
    RealizationError,
    build_bipartite,
    build_forest,
    build_havel_hakimi,
    build_loopless,
    build_multigraph,
    check_erdos_gallai,
    check_forest,
    check_gale_ryser,
    check_loopless,
    check_multigraph,
    maxsum_table,
)


# -- brute-force oracles ------------------------------------------------------


@lru_cache(maxsize=None)
def graphical_sequences(n):
    """Sorted degree sequences of all simple graphs on n vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    out = set()
    for mask in range(1 << len(pairs)):
        deg = [0] * n
        for k, (u, v) in enumerate(pairs):
            if mask >> k & 1:
                deg[u] += 1
                deg[v] += 1
        out.add(tuple(sorted(deg)))
    return out


@lru_cache(maxsize=None)
def forest_sequences(n):
    pairs = list(itertools.combinations(range(n), 2))
    out = set()
    for mask in range(1 << len(pairs)):
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        if LabeledGraph(n, edges).is_acyclic():
            deg = [0] * n
            for u, v in edges:
                deg[u] += 1
                deg[v] += 1
            out.add(tuple(sorted(deg)))
    return out


@lru_cache(maxsize=None)
def bigraphical(p, q):
    out = set()
    cells = [(i, j) for i in range(p) for j in range(q)]
    for mask in range(1 << len(cells)):
        a, b = [0] * p, [0] * q
        for k, (i, j) in enumerate(cells):
            if mask >> k & 1:
                a[i] += 1
                b[j] += 1
        out.add((tuple(sorted(a)), tuple(sorted(b))))
    return out


def loopless_exists(seq):
    """Loopless multigraph existence by recursive edge placement."""
    seq = sorted(seq, reverse=True)
    while seq and seq[-1] == 0:
        seq.pop()
    if not seq:
        return True
    u = 0
    for w in range(1, len(seq)):
        nxt = list(seq)
        nxt[u] -= 1
        nxt[w] -= 1
        if loopless_exists(nxt):
            return True
    return False


# -- examples --------------------------------------------------------------------


def test_eg_examples():
    assert not check_erdos_gallai([4, 4])
    assert check_erdos_gallai([3, 1, 1, 1])
    assert check_erdos_gallai([2, 2, 2])


def test_gr_examples():
    assert check_gale_ryser([2, 2], [2, 2])
    assert not check_gale_ryser([2], [1])
    assert check_gale_ryser([3, 3], [2, 2, 2])


def test_simple_class_checks():
    assert check_multigraph([4, 4]) and check_loopless([4, 4]) and not check_forest([4, 4])
    assert check_multigraph([2]) and not check_loopless([2])
    assert not check_forest([2, 2, 2])


def test_builder_examples():
    assert build_havel_hakimi([1, 1]).edges == ((0, 1),)
    tri = build_havel_hakimi([2, 2, 2])
    assert tri.edges == ((0, 1), (0, 2), (1, 2))
    star = build_havel_hakimi([3, 1, 1, 1])
    assert star.edges == ((0, 1), (0, 2), (0, 3))
    assert build_bipartite([1], [1]).edges == ((0, 1),)
    c4 = build_bipartite([2, 2], [2, 2])
    assert c4.n_edges == 4 and c4.is_simple() and set(c4.degrees) == {2}
    g = build_bipartite([2, 1, 1], [2, 2])
    assert g.n_edges == 4 and g.degrees == (2, 1, 1, 2, 2)
    assert build_multigraph([2]).edges == ((0, 0),)
    assert build_loopless([4, 4]).edges == ((0, 1),) * 4
    f = build_forest([1, 1, 1, 1])
    assert f.n_edges == 2 and f.is_acyclic()


def test_builders_reject_infeasible():
    for fn, seq in [
        (build_havel_hakimi, [4, 4]),
        (build_loopless, [2]),
        (build_forest, [2, 2, 2]),
        (build_multigraph, [1]),
    ]:
        with pytest.raises(RealizationError):
            fn(seq)
    with pytest.raises(RealizationError):
        build_bipartite([2], [1])


def test_maxsum_examples():
    assert not maxsum_table([0, 0, 0]).values.any()
    t = maxsum_table([2, 1])
    assert t[2, 2] == 3
    tc = maxsum_table([0, 0, 4], k_max=3, capped=True)
    assert tc[3, 2] == 4


# -- brute-force agreement --------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 7))
def test_eg_matches_brute_force(n):
    graphical = graphical_sequences(n)
    for seq in itertools.combinations_with_replacement(range(n), n):
        assert check_erdos_gallai(seq) == (tuple(sorted(seq)) in graphical), seq


@pytest.mark.parametrize("n", range(1, 6))
def test_forest_matches_brute_force(n):
    forests = forest_sequences(n)
    for seq in itertools.combinations_with_replacement(range(n), n):
        assert check_forest(seq) == (tuple(sorted(seq)) in forests), seq


@pytest.mark.parametrize("p,q", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 3)])
def test_gr_matches_brute_force(p, q):
    big = bigraphical(p, q)
    for a in itertools.combinations_with_replacement(range(q + 1), p):
        for b in itertools.combinations_with_replacement(range(p + 1), q):
            assert check_gale_ryser(a, b) == ((tuple(sorted(a)), tuple(sorted(b))) in big), (a, b)


def test_loopless_matches_brute_force():
    for n in range(1, 5):
        for seq in itertools.combinations_with_replacement(range(6), n):
            if sum(seq) % 2 == 0:
                assert check_loopless(seq) == loopless_exists(list(seq)), seq


# -- builders verified post hoc ------------------------------------------------------


seqs = st.lists(st.integers(0, 5), min_size=1, max_size=9)


@given(seqs)
def test_havel_hakimi_exact(seq):
    if check_erdos_gallai(seq):
        g = build_havel_hakimi(seq)
        assert list(g.degrees) == seq and g.is_simple()


@given(seqs)
def test_forest_builder_exact(seq):
    if check_forest(seq):
        g = build_forest(seq)
        assert list(g.degrees) == seq and g.is_acyclic()
        p = sum(1 for v in seq if v > 0)
        isolated = len(seq) - p
        assert g.n_components() - isolated == p - sum(seq) // 2


@given(seqs)
def test_multigraph_builders_exact(seq):
    if check_multigraph(seq):
        assert list(build_multigraph(seq).degrees) == seq
    if check_loopless(seq):
        g = build_loopless(seq)
        assert list(g.degrees) == seq and not g.has_loops()


@given(st.lists(st.integers(0, 4), min_size=1, max_size=6), st.lists(st.integers(0, 4), min_size=1, max_size=6))
def test_bipartite_builder_exact(a, b):
    if check_gale_ryser(a, b):
        g = build_bipartite(a, b)
        p = len(a)
        assert list(g.degrees) == a + b and g.is_simple()
        assert all(u < p <= v for u, v in g.edges)


# -- truncation soundness ------------------------------------------------------------


def test_eg_truncation_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        delta = int(rng.integers(1, 7))
        seq = rng.integers(0, delta + 1, size=int(rng.integers(1, 12))).tolist()
        assert check_erdos_gallai(seq, k_limit=delta) == check_erdos_gallai(seq)


def test_gr_truncation_random():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        delta = int(rng.integers(2, 7))
        a = rng.integers(0, delta + 1, size=int(rng.integers(1, 9))).tolist()
        b = rng.integers(0, delta + 1, size=int(rng.integers(1, 9))).tolist()
        assert check_gale_ryser(a, b, k_limit=max(b) - 1 if max(b) > 1 else 1) == check_gale_ryser(a, b)
        assert check_gale_ryser(a, b, k_limit=delta - 1) == check_gale_ryser(a, b)


# -- top-k sum tables --------------------------------------------------------------


def oracle_table(counts, k_max, capped):
    L = len(counts)
    t = np.zeros((L + 1, k_max + 1), dtype=np.int64)
    for l in range(L + 1):
        vals = sorted((v for v in range(1, l + 1) for _ in range(counts[v - 1])), reverse=True)
        for k in range(k_max + 1):
            top = vals[:k]
            t[l, k] = sum(min(v, k) for v in top) if capped else sum(top)
    return t


def test_maxsum_matches_sort_oracle():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        delta = int(rng.integers(1, 7))
        counts = rng.integers(0, 5, size=delta).tolist()
        k_max = delta
        for capped in (False, True):
            got = maxsum_table(counts, k_max=k_max, capped=capped).values
            assert np.array_equal(got, oracle_table(counts, k_max, capped)), (counts, capped)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=6))
def test_maxsum_monotone(counts):
    t = maxsum_table(counts).values
    assert (t[:, 0] == 0).all()
    assert (np.diff(t, axis=0) >= 0).all() and (np.diff(t, axis=1) >= 0).all()


def test_paper_capped_recursion_never_exceeds_exact():
    rng = np.random.default_rng(12)
    for _ in range(300):
        counts = rng.integers(0, 4, size=int(rng.integers(1, 5))).tolist()
        lit = seqcheck.paper_capped_recursion(counts, k_max=4)
        exact = maxsum_table(counts, k_max=4, capped=True).values
        assert (lit <= exact).all()
