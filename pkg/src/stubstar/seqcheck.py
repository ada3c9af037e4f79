"""Degree-sequence tests and constructive realizers.

Sequences are plain lists of nonnegative integers; zeros are allowed and are
ignored by the builders.  Every builder returns a :class:`LabeledGraph` on
``len(seq)`` vertices (``len(a) + len(b)`` for the bipartite ones) and raises
:class:`RealizationError` if its test fails.
"""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import LabeledGraph


class RealizationError(ValueError):
    """The input sequence does not have a realization of the requested kind."""


# ---------------------------------------------------------------------------
# Tests
# ---------------------------------------------------------------------------


def check_erdos_gallai(seq: Sequence[int], k_limit: int | None = None) -> bool:
    d = sorted((int(v) for v in seq), reverse=True)
    if any(v < 0 for v in d) or sum(d) % 2:
        return False
    n = len(d)
    kmax = n if k_limit is None else min(k_limit, n)
    prefix = 0
    for k in range(1, kmax + 1):
        prefix += d[k - 1]
        rhs = k * (k - 1) + sum(min(k, v) for v in d[k:])
        if prefix > rhs:
            return False
    return True


def check_gale_ryser(a: Sequence[int], b: Sequence[int], k_limit: int | None = None) -> bool:
    a = sorted((int(v) for v in a), reverse=True)
    b = [int(v) for v in b]
    if any(v < 0 for v in a) or any(v < 0 for v in b) or sum(a) != sum(b):
        return False
    kmax = len(a) if k_limit is None else min(k_limit, len(a))
    # sum_j min(k, b_j) = (sum of b_j below k) + k * #(b_j >= k)
    bs = sorted(b)
    below = 0
    idx = 0
    prefix = 0
    for k in range(1, kmax + 1):
        while idx < len(bs) and bs[idx] < k:
            below += bs[idx]
            idx += 1
        prefix += a[k - 1]
        if prefix > below + k * (len(bs) - idx):
            return False
    return True


def check_multigraph(seq: Sequence[int]) -> bool:
    return all(v >= 0 for v in seq) and sum(seq) % 2 == 0


def check_loopless(seq: Sequence[int]) -> bool:
    if not check_multigraph(seq):
        return False
    if not seq:
        return True
    return max(seq) <= sum(seq) - max(seq)


def check_forest(seq: Sequence[int]) -> bool:
    if not check_multigraph(seq):
        return False
    total = sum(seq)
    if total == 0:
        return True
    p = sum(1 for v in seq if v > 0)
    return total <= 2 * (p - 1)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def build_havel_hakimi(seq: Sequence[int]) -> LabeledGraph:
    """Simple realization; the max-degree vertex (lowest index on ties) is
    joined to the next-largest remaining vertices."""
    if not check_erdos_gallai(seq):
        raise RealizationError(f"{list(seq)} is not graphical")
    rem = [int(v) for v in seq]
    edges = []
    while True:
        order = sorted((v for v in range(len(rem)) if rem[v] > 0), key=lambda v: (-rem[v], v))
        if not order:
            break
        u, rest = order[0], order[1:]
        k = rem[u]
        if k > len(rest):
            raise RealizationError(f"{list(seq)} is not graphical")
        for w in rest[:k]:
            edges.append((u, w))
            rem[w] -= 1
        rem[u] = 0
    return LabeledGraph(len(rem), edges)


def build_bipartite(
    a: Sequence[int], b: Sequence[int], multi: bool = False
) -> LabeledGraph:
    """Realize ``(a, b)`` with every edge crossing sides.

    Vertices ``0..len(a)-1`` form side ``a``; the rest form side ``b``.  With
    ``multi=True`` parallel edges are allowed and only equal sums are needed.
    """
    a = [int(v) for v in a]
    b = [int(v) for v in b]
    p = len(a)
    if multi:
        if any(v < 0 for v in a + b) or sum(a) != sum(b):
            raise RealizationError(f"bipartite sums differ: {a} vs {b}")
        stubs_b = [p + j for j, v in enumerate(b) for _ in range(v)]
        stubs_a = [i for i, v in enumerate(a) for _ in range(v)]
        return LabeledGraph(p + len(b), zip(stubs_a, stubs_b))
    if not check_gale_ryser(a, b):
        raise RealizationError(f"({a}, {b}) is not bigraphical")
    # side b bucketed by remaining degree, indices ascending in each bucket,
    # so targets come out in (-remaining, index) order without a full sort
    buckets = [[] for _ in range(max(b, default=0) + 1)]
    for j, v in enumerate(b):
        buckets[v].append(j)
    edges = []
    for i in sorted(range(p), key=lambda i: (-a[i], i)):
        need, targets = a[i], []
        for v in range(len(buckets) - 1, 0, -1):
            if len(targets) == need:
                break
            take = buckets[v][: need - len(targets)]
            del buckets[v][: len(take)]
            targets.extend((j, v) for j in take)
        if len(targets) < need:
            raise RealizationError(f"({a}, {b}) is not bigraphical")
        for j, v in targets:
            edges.append((i, p + j))
            if v > 1:
                bisect.insort(buckets[v - 1], j)
    return LabeledGraph(p + len(b), edges)


def build_multigraph(seq: Sequence[int]) -> LabeledGraph:
    """Loops at each odd-surplus vertex first, then greedy pairing of the rest."""
    if not check_multigraph(seq):
        raise RealizationError(f"{list(seq)} has odd sum")
    rem = [int(v) for v in seq]
    edges = []
    odd = [v for v in range(len(rem)) if rem[v] % 2]
    for v in range(len(rem)):
        for _ in range(rem[v] // 2):
            edges.append((v, v))
    # odd vertices are matched pairwise; their count is even
    for u, w in zip(odd[0::2], odd[1::2]):
        edges.append((u, w))
    return LabeledGraph(len(rem), edges)


def build_loopless(seq: Sequence[int]) -> LabeledGraph:
    """Loopless multigraph: repeatedly join the two largest remaining degrees."""
    if not check_loopless(seq):
        raise RealizationError(f"{list(seq)} has no loopless realization")
    heap = [(-int(v), i) for i, v in enumerate(seq) if v > 0]
    heapq.heapify(heap)
    edges = []
    while heap:
        du, u = heapq.heappop(heap)
        dw, w = heapq.heappop(heap)
        edges.append((u, w))
        if du + 1:
            heapq.heappush(heap, (du + 1, u))
        if dw + 1:
            heapq.heappush(heap, (dw + 1, w))
    return LabeledGraph(len(seq), edges)


def build_forest(seq: Sequence[int]) -> LabeledGraph:
    """Forest realization.

    Vertices of degree >= 2 form one caterpillar (in descending degree order),
    using just enough leaves; the remaining leaves are paired into single edges.
    """
    if not check_forest(seq):
        raise RealizationError(f"{list(seq)} is not forest realizable")
    inner = sorted((v for v in range(len(seq)) if seq[v] >= 2), key=lambda v: (-seq[v], v))
    leaves = [v for v in range(len(seq)) if seq[v] == 1]
    edges = []
    for u, w in zip(inner, inner[1:]):
        edges.append((u, w))
    leaf_iter = iter(leaves)
    for pos, u in enumerate(inner):
        spine_deg = (pos > 0) + (pos < len(inner) - 1)
        for _ in range(seq[u] - spine_deg):
            edges.append((u, next(leaf_iter)))
    rest = list(leaf_iter)
    for u, w in zip(rest[0::2], rest[1::2]):
        edges.append((u, w))
    return LabeledGraph(len(seq), edges)


# ---------------------------------------------------------------------------
# Top-k sums of a value histogram
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxSumTable:
    """``values[l, k]``: largest sum of at most ``k`` entries, each entry <= ``l``.

    The entries are the multiset holding value ``l`` exactly ``counts[l-1]``
    times.  In the capped table each entry ``v`` counts as ``min(v, k)``.
    """

    counts: tuple[int, ...]
    values: np.ndarray
    capped: bool

    def __getitem__(self, lk):
        return int(self.values[lk])


def _maxsum_dp(s, k_max, cap=None):
    L = len(s)
    t = np.zeros((L + 1, k_max + 1), dtype=np.int64)
    for l in range(1, L + 1):
        w = l if cap is None else min(l, cap)
        for k in range(k_max + 1):
            t[l, k] = max(t[l - 1, k - kp] + w * min(kp, s[l - 1]) for kp in range(k + 1))
    return t


def maxsum_table(
    counts: Sequence[int], k_max: int | None = None, capped: bool = False
) -> MaxSumTable:
    """Dynamic program over value levels ``l = 1..len(counts)``.

    ``t[l, k] = max_{k'} t[l-1, k-k'] + l * min(k', s_l)``; the capped variant
    uses weight ``min(l, k)`` with ``k`` the final entry count, so one DP is run
    per ``k``.
    """
    s = [int(v) for v in counts]
    if any(v < 0 for v in s):
        raise ValueError("counts must be nonnegative")
    if k_max is None:
        k_max = len(s)
    if not capped:
        vals = _maxsum_dp(s, k_max)
    else:
        vals = np.zeros((len(s) + 1, k_max + 1), dtype=np.int64)
        for k in range(k_max + 1):
            vals[:, k] = _maxsum_dp(s, k, cap=k)[:, k]
    vals.setflags(write=False)
    return MaxSumTable(tuple(s), vals, capped)


def paper_capped_recursion(counts: Sequence[int], k_max: int | None = None) -> np.ndarray:
    """Capped recursion with the cap tied to the running entry count.

    ``t[l, k] = max_{k'} t[l-1, k-k'] + min(l, k) * min(k', s_l)``.  This can
    undercount the capped top-k sum; it is kept only for the EG-row diagnostic.
    """
    s = [int(v) for v in counts]
    if k_max is None:
        k_max = len(s)
    L = len(s)
    t = np.zeros((L + 1, k_max + 1), dtype=np.int64)
    for l in range(1, L + 1):
        for k in range(k_max + 1):
            t[l, k] = max(
                t[l - 1, k - kp] + min(l, k) * min(kp, s[l - 1]) for kp in range(k + 1)
            )
    return t
