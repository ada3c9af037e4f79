"""Direct, encoding-free realizability tests for a stub-star ensemble."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..model import Ensemble, GraphClass, chromatic_degree, color_list
from .. import seqcheck


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _diag_sequences(e: Ensemble):
    for i in range(1, e.delta + 1):
        seq = [s.count(i) for s in e.stars() if s.height == i]
        yield i, seq


def _multigraph(e: Ensemble, out: list[str]):
    for i, seq in _diag_sequences(e):
        if sum(seq) % 2:
            out.append(f"colour ({i},{i}): odd stub count {sum(seq)}")
    for i, j in color_list(e.delta):
        if i == j:
            continue
        a, b = e.bipartite_sequences((i, j))
        if sum(a) != sum(b):
            out.append(f"colour ({i},{j}): unbalanced {sum(a)} vs {sum(b)}")


def forest_violations(e: Ensemble) -> list[tuple[tuple[int, int], ...]]:
    """Colour sets whose multichromatic degree sequence is not forest realizable.

    Colours without stubs are left out: adding them changes no sequence.
    """
    items = list(e.counts.items())
    colors = color_list(e.delta)
    cd = np.array([[chromatic_degree(lam, c) for c in colors] for lam, _ in items], dtype=np.int64)
    cnt = np.array([k for _, k in items], dtype=np.int64)
    live = [k for k in range(len(colors)) if cd[:, k].any()]
    bad = []
    for r in range(1, len(live) + 1):
        subsets = list(combinations(live, r))
        for lo in range(0, len(subsets), 4096):
            block = subsets[lo : lo + 4096]
            sel = np.zeros((len(colors), len(block)), dtype=np.int64)
            for col, I in enumerate(block):
                sel[list(I), col] = 1
            d = cd @ sel
            total = cnt @ d
            positive = cnt @ (d > 0)
            for col in np.flatnonzero((total % 2 == 1) | ((total > 0) & (total > 2 * (positive - 1)))):
                bad.append(tuple(colors[k] for k in block[col]))
    return bad


def validate_ensemble(e: Ensemble, cls: GraphClass) -> ValidationReport:
    cls = GraphClass(cls)
    out: list[str] = []
    _multigraph(e, out)
    if cls is GraphClass.LOOPLESS:
        for i, seq in _diag_sequences(e):
            if seq and 2 * max(seq) > sum(seq):
                out.append(f"colour ({i},{i}): loop forced, max {max(seq)} > rest")
    if cls in (GraphClass.SIMPLE, GraphClass.CONNECTED_SIMPLE):
        for i, seq in _diag_sequences(e):
            if not seqcheck.check_erdos_gallai(seq):
                out.append(f"colour ({i},{i}): Erdos-Gallai fails on {sorted(seq, reverse=True)}")
        for i, j in color_list(e.delta):
            if i == j:
                continue
            a, b = e.bipartite_sequences((i, j))
            if not seqcheck.check_gale_ryser(a, b):
                out.append(f"colour ({i},{j}): Gale-Ryser fails")
        if cls is GraphClass.CONNECTED_SIMPLE and e.degree_sum < 2 * (e.n - 1):
            out.append(f"too few edges to connect: {e.degree_sum // 2} < {e.n - 1}")
    if cls.acyclic:
        for I in forest_violations(e):
            out.append("colour set {" + ",".join(f"({i},{j})" for i, j in I) + "}: not forest realizable")
    if cls in (GraphClass.TREE, GraphClass.CATERPILLAR) and e.degree_sum != 2 * e.n - 2:
        out.append(f"degree sum {e.degree_sum} != 2n-2 = {2 * e.n - 2}")
    if cls is GraphClass.CATERPILLAR:
        for lam in e.counts:
            if lam.height > 1 and sum(1 for p in lam.parts if p > 1) > 2:
                out.append(f"stub-star {lam!r} has more than two labels above 1")
    return ValidationReport(not out, out)
