"""Ensemble counting without enumerating ensembles one by one.

Stub-stars of different degrees interact only through the balance/parity rows
and, for acyclic classes, the colour-set rows.  Both depend on a degree class
only through its stub-count vector ``c[i, :]`` and how many of its stars carry
each label support set.  So each degree class is enumerated separately,
collapsed onto that key with multiplicities, and the classes are joined on
balance; colour-set rows are checked in bulk on the joined keys.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import combinations_with_replacement
from dataclasses import dataclass

import numpy as np

from ..model import GraphClass, Instance, enumerate_partitions
from .kernel import EAGER_COLORS
from ..model import color_list

_CHUNK = 2048

FAST_CLASSES = (
    GraphClass.MULTIGRAPH,
    GraphClass.FOREST,
    GraphClass.TREE,
    GraphClass.CATERPILLAR,
)


@dataclass
class CountResult:
    count: int
    truncated: bool = False

    @property
    def label(self) -> str:
        return f">={self.count}" if self.truncated else str(self.count)


def _allowed(lam, cls):
    if cls is GraphClass.CATERPILLAR and lam.height > 1:
        return sum(1 for p in lam.parts if p > 1) <= 2
    return True


def _support_mask(lam) -> int:
    m = 0
    for p in lam.parts:
        m |= 1 << (p - 1)
    return m


def _class_keys(inst: Instance, cls, i: int, delta: int):
    """Map key -> number of distinct degree-i sub-ensembles with that key.

    key = (c_1..c_delta, support histogram over the 2^delta - 1 label sets)
    """
    nsup = (1 << delta) - 1
    by_f = defaultdict(list)
    for lam in enumerate_partitions(delta):
        if lam.height == i and _allowed(lam, cls):
            by_f[lam.size].append(lam)
    acc = {(0,) * (delta + nsup): 1}
    for (d, f), y in sorted(inst.histogram.items()):
        if d != i:
            continue
        parts = by_f.get(f, [])
        if not parts:
            return {}
        local = defaultdict(int)
        for combo in combinations_with_replacement(parts, y):
            key = [0] * (delta + nsup)
            for lam in combo:
                for p in lam.parts:
                    key[p - 1] += 1
                key[delta + _support_mask(lam) - 1] += 1
            local[tuple(key)] += 1
        nxt = defaultdict(int)
        for k1, m1 in acc.items():
            for k2, m2 in local.items():
                nxt[tuple(a + b for a, b in zip(k1, k2))] += m1 * m2
        acc = nxt
    return acc


def _subset_tables(delta: int):
    """For every nonempty colour set: per degree i, the label mask J_i."""
    colors = color_list(delta)
    C = len(colors)
    masks = np.arange(1, 1 << C, dtype=np.int64)
    J = np.zeros((len(masks), delta), dtype=np.int64)
    for c, (a, b) in enumerate(colors):
        on = (masks >> c) & 1
        J[:, a - 1] |= on << (b - 1)
        J[:, b - 1] |= on << (a - 1)
    return J


def count_ensembles(inst: Instance, cls: GraphClass | str, cap: int | None = None) -> CountResult:
    """Number of ensembles feasible for ``inst`` under ``cls``.

    Supports the classes in ``FAST_CLASSES``; others raise ``ValueError``.
    """
    cls = GraphClass(cls)
    if cls not in FAST_CLASSES:
        raise ValueError(f"fast counting does not support class {cls.value}")
    delta = inst.delta
    acyclic = cls.acyclic
    if acyclic and len(color_list(delta)) > EAGER_COLORS:
        raise ValueError("fast counting of acyclic classes is limited to delta <= 4")
    if cls in (GraphClass.TREE, GraphClass.CATERPILLAR) and inst.degree_sum != 2 * inst.n - 2:
        return CountResult(0)
    nsup = (1 << delta) - 1
    keys = []
    for i in range(1, delta + 1):
        table = _class_keys(inst, cls, i, delta)
        if not table:
            return CountResult(0)
        keys.append(table)

    if acyclic:
        J = _subset_tables(delta)
        # a degree-i key meets colour set s only through the label mask J[s, i-1],
        # so contributions are tabulated per mask and expanded on demand
        masks = np.arange(1 << delta, dtype=np.int64)
        mask_bits = ((masks[:, None] >> np.arange(delta)) & 1).astype(np.int64)
        sup = np.arange(1, nsup + 1, dtype=np.int64)
        mask_hit = ((masks[:, None] & sup[None, :]) > 0).astype(np.int64)

    # per degree: arrays of c rows, S and V contributions, multiplicities
    levels = []
    for idx, table in enumerate(keys):
        i = idx + 1
        ks = np.array(list(table.keys()), dtype=np.int64)
        mult = np.array(list(table.values()), dtype=object)
        crow = ks[:, :delta]
        keep = crow[:, i - 1] % 2 == 0
        ks, mult, crow = ks[keep], mult[keep], crow[keep]
        lvl = {"c": crow, "mult": mult}
        if acyclic:
            lvl["S"] = (crow @ mask_bits.T).astype(np.int32)
            lvl["V"] = (ks[:, delta:] @ mask_hit.T).astype(np.int32)
            lvl["J"] = J[:, i - 1]
        # bucket by the balance-relevant prefix c[i, 1..i-1]
        buckets = defaultdict(list)
        for r in range(len(crow)):
            buckets[tuple(crow[r, : i - 1])].append(r)
        lvl["buckets"] = {k: np.array(v) for k, v in buckets.items()}
        levels.append(lvl)

    total = 0
    C = np.zeros((delta, delta), dtype=np.int64)

    def rec(i, S, V, m):
        nonlocal total
        lvl = levels[i - 1]
        need = tuple(int(C[j - 1, i - 1]) for j in range(1, i))
        rows = lvl["buckets"].get(need)
        if rows is None:
            return
        if i == delta:
            if acyclic:
                ok = []
                for lo in range(0, len(rows), _CHUNK):
                    blk = rows[lo : lo + _CHUNK]
                    S2 = S[None, :] + lvl["S"][blk][:, lvl["J"]]
                    V2 = V[None, :] + lvl["V"][blk][:, lvl["J"]]
                    ok.append(blk[~np.any((S2 > 0) & (S2 > 2 * V2 - 2), axis=1)])
                rows = np.concatenate(ok)
            # balance into degrees above delta is vacuous
            total += m * sum(lvl["mult"][rows])
            return
        for r in rows:
            C[i - 1] = lvl["c"][r]
            if acyclic:
                j = lvl["J"]
                rec(i + 1, S + lvl["S"][r, j], V + lvl["V"][r, j], m * lvl["mult"][r])
            else:
                rec(i + 1, S, V, m * lvl["mult"][r])
            if cap is not None and total >= cap:
                return
        C[i - 1] = 0

    nrows = len(J) if acyclic else 1
    rec(1, np.zeros(nrows, dtype=np.int32), np.zeros(nrows, dtype=np.int32), 1)
    total = int(total)
    if cap is not None and total >= cap:
        return CountResult(cap, True)
    return CountResult(total)
