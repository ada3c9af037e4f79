import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import COUNTEREXAMPLE_EDGES, simple_graphs
from stubstar.feasibility import (
    LinearSystem,
    audit_links,
    build_system,
    encode_max,
    encode_min,
    enumerate_all,
    solve_first,
    validate_ensemble,
)
from stubstar.feasibility.system import LinExpr
from stubstar.model import (
    BoundError,
    Ensemble,
    GraphClass,
    InfeasiblePairError,
    LabeledGraph,
    Partition,
    ensemble_from_graph,
    enumerate_partitions,
    instance_from_ensemble,
    instance_from_graph,
    instance_from_lists,
)
from stubstar.oracle import random_tree

ALL = list(GraphClass)
DECIDABLE = [c for c in GraphClass if c is not GraphClass.CONNECTED_SIMPLE]


# -- independent enumeration of ensembles compatible with an instance ----------------


def compatible_ensembles(inst):
    """Every ensemble whose (height, size) histogram equals the instance's."""
    groups = []
    for (d, f), y in inst.histogram.items():
        parts = [p for p in enumerate_partitions(inst.delta) if p.height == d and p.size == f]
        groups.append([Counter(c) for c in itertools.combinations_with_replacement(parts, y)])
    for combo in itertools.product(*groups):
        total = Counter()
        for c in combo:
            total.update(c)
        yield Ensemble(total, inst.delta)


def fix_x(sysm, e):
    for lam, name in zip(sysm.kernel.partitions, sysm.x_names):
        sysm.add(LinExpr({name: 1}), "==", e[lam], f"fix_{name}")
    return sysm


# -- Lemma min/max encodings ---------------------------------------------------------


def test_encode_min_constants_unique():
    s = LinearSystem()
    encode_min(s, 3, 5, 2, "z")
    sols = enumerate_all(s).solutions
    assert sols == [{"z": 3, "z_b": 0}]


def test_encode_min_tie_two_solutions():
    s = LinearSystem()
    encode_min(s, 4, 4, 1, "z")
    sols = enumerate_all(s).solutions
    assert sorted((a["z"], a["z_b"]) for a in sols) == [(4, 0), (4, 1)]


def test_encode_max_constants():
    s = LinearSystem()
    encode_max(s, 7, 2, 5, "z")
    assert {a["z"] for a in enumerate_all(s)} == {7}


def test_encode_small_m_rejected():
    s = LinearSystem()
    x = s.add_var("x", 0, 10)
    with pytest.raises(BoundError):
        encode_min(s, x, 0, 5, "z")


@given(
    st.integers(-4, 4), st.integers(0, 4), st.integers(-4, 4), st.integers(0, 4), st.sampled_from(["min", "max"])
)
def test_encoding_equals_true_min_max(xl, xw, yl, yw, kind):
    s = LinearSystem()
    x = s.add_var("x", xl, xl + xw)
    y = s.add_var("y", yl, yl + yw)
    M = max(abs(xl - yl - yw), abs(xl + xw - yl), 1)
    (encode_min if kind == "min" else encode_max)(s, x, y, M, "z")
    sols = enumerate_all(s).solutions
    assert {(a["x"], a["y"]) for a in sols} == {
        (a, b) for a in range(xl, xl + xw + 1) for b in range(yl, yl + yw + 1)
    }
    for a in sols:
        assert not audit_links(s, a)


# -- solver basics ----------------------------------------------------------------


def test_empty_system():
    assert solve_first(LinearSystem()) == {}


def test_contradiction_infeasible():
    s = LinearSystem()
    x = s.add_var("x", 0, 3)
    s.add(x, ">=", 2)
    s.add(x, "<=", 1)
    assert solve_first(s) is None


def test_multigraph_double_four_star():
    sysm = build_system(instance_from_lists((4, 4), (16, 16)), "multigraph")
    sol = solve_first(sysm)
    assert sol["x_4_4_4_4"] == 2 and sol["p_4"] == 4


def test_solve_first_lexicographic_without_relaxation():
    # relaxation pruning only skips empty subtrees, so the first solution is the same
    for s in range(15):
        inst = instance_from_graph(random_tree(30, 4, s))
        a = solve_first(build_system(inst, "tree"), relax=False)
        b = solve_first(build_system(inst, "tree"), relax=True)
        assert a == b


# -- build_system examples ----------------------------------------------------------


def test_single_edge_tree():
    sysm = build_system(instance_from_lists((1, 1), (1, 1)), "tree")
    sol = solve_first(sysm)
    assert sol["x_1"] == 2
    assert len(enumerate_all(sysm)) == 1


def test_counterexample_tree_and_simple(counterexample):
    assert solve_first(build_system(counterexample, "tree")) is None
    sysm = build_system(counterexample, "simple")
    sol = enumerate_all(sysm)
    assert len(sol) == 1
    e = sysm.ensemble(sol.solutions[0])
    assert e.counts == {Partition([3]): 1, Partition([2, 3]): 2, Partition([1, 2, 2]): 1}


def test_counterexample_forest_row(counterexample):
    # the colour set {(2,2),(2,3)} has 8 stubs on 3 positive vertices
    e = ensemble_from_graph(LabeledGraph(4, COUNTEREXAMPLE_EDGES))
    from stubstar.feasibility import forest_violations

    assert ((2, 3), (2, 2)) in forest_violations(e) or ((2, 2), (2, 3)) in forest_violations(e)


def test_tree_degree_sum_guard():
    assert solve_first(build_system(instance_from_lists((2, 2, 2), (4, 4, 4)), "tree")) is None


def test_lp_dump(counterexample):
    text = build_system(counterexample, "tree", "paper").to_lp()
    assert text.startswith("\\ tree-paper") and "Subject To" in text and text.rstrip().endswith("End")


# -- validate_ensemble examples -------------------------------------------------------


def test_validate_examples():
    e = ensemble_from_graph(LabeledGraph(4, COUNTEREXAMPLE_EDGES))
    assert not validate_ensemble(e, "forest")
    assert validate_ensemble(e, "simple")
    loop = Ensemble({Partition([2, 2]): 1}, 2)
    assert not validate_ensemble(loop, "loopless")
    assert validate_ensemble(loop, "multigraph")


# -- enumeration ----------------------------------------------------------------------


def test_enumeration_cap():
    inst = instance_from_graph(random_tree(40, 4, 3))
    sysm = build_system(inst, "tree")
    full = enumerate_all(sysm, cap=10_000)
    capped = enumerate_all(sysm, cap=1)
    assert len(capped) == 1
    assert capped.truncated == (len(full) > 1)


def test_random_trees_n10_about_one():
    counts = [len(enumerate_all(build_system(instance_from_graph(random_tree(10, 4, s)), "tree"))) for s in range(100)]
    assert 1 <= np.mean(counts) <= 1.5


# -- properties --------------------------------------------------------------------


def small_instances(max_n=6):
    return simple_graphs(max_n=max_n).map(instance_from_graph)


@given(small_instances(7), st.sampled_from(DECIDABLE))
def test_soundness_and_completeness(inst, cls):
    sysm = build_system(inst, cls)
    sol = solve_first(sysm)
    brute = [e for e in compatible_ensembles(inst) if validate_ensemble(e, cls)]
    if cls in (GraphClass.TREE, GraphClass.CATERPILLAR) and inst.degree_sum != 2 * inst.n - 2:
        brute = []
    if sol is None:
        assert not brute
    else:
        assert sysm.is_satisfied(sol)
        assert validate_ensemble(sysm.ensemble(sol), cls)
        assert sysm.ensemble(sol) in brute


@given(small_instances(6), st.sampled_from([GraphClass.TREE, GraphClass.FOREST, GraphClass.SIMPLE]))
def test_enumeration_matches_brute_force(inst, cls):
    got = {build_system(inst, cls).ensemble(a) for a in enumerate_all(build_system(inst, cls))}
    want = {e for e in compatible_ensembles(inst) if validate_ensemble(e, cls)}
    if cls is GraphClass.TREE and inst.degree_sum != 2 * inst.n - 2:
        want = set()
    assert got == want


@given(simple_graphs(max_n=7))
def test_graph_instances_feasible_for_their_classes(g):
    inst = instance_from_graph(g)
    classes = [GraphClass.MULTIGRAPH, GraphClass.LOOPLESS, GraphClass.SIMPLE]
    if g.is_acyclic():
        classes.append(GraphClass.FOREST)
    if g.is_tree():
        classes.append(GraphClass.TREE)
    if g.is_caterpillar():
        classes.append(GraphClass.CATERPILLAR)
    for cls in classes:
        assert solve_first(build_system(inst, cls)) is not None, cls


@settings(max_examples=25)
@given(small_instances(5))
def test_tree_rows_monotone(inst):
    """Dropping forest rows can only add solutions."""
    full = build_system(inst, "tree", "paper")
    sols_full = {full.ensemble(a) for a in enumerate_all(full)}
    part = build_system(inst, "tree", "paper")
    rng = np.random.default_rng(len(part.constraints))
    keep = [c for c in part.constraints if not c.label.startswith("forest_") or rng.random() < 0.5]
    part.constraints = keep
    part._compiled = None
    sols_part = {part.ensemble(a) for a in enumerate_all(part)}
    assert sols_full <= sols_part


def loopless_ensembles(n_max, delta):
    parts = enumerate_partitions(delta)
    for n in range(1, n_max + 1):
        for combo in itertools.combinations_with_replacement(parts, n):
            yield Ensemble(Counter(combo), delta)


def test_loopless_encodings_agree_exhaustive_small():
    for e in loopless_ensembles(3, 3):
        try:
            inst = instance_from_ensemble(e)
        except InfeasiblePairError:
            continue  # f > d * max(d): the instance cannot even be written down
        if inst.delta != 3:
            continue
        sem = validate_ensemble(e, "loopless").ok
        paper = solve_first(fix_x(build_system(inst, "loopless", "paper"), e)) is not None
        assert sem == paper, e


@given(small_instances(8))
def test_loopless_paper_solutions_validate(inst):
    sysm = build_system(inst, "loopless", "paper")
    for a in enumerate_all(sysm, cap=50):
        assert validate_ensemble(sysm.ensemble(a), "loopless")
        assert not audit_links(sysm, a)
