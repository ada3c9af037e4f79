"""Core domain types: partitions, stub-star ensembles, (D, F) instances and graphs.

A vertex of degree ``d`` whose neighbours have degrees ``a_1, ..., a_d`` is
summarised by the partition ``{a_1, ..., a_d}``: its height is the degree and
its size is the neighbour-degree sum.  An ensemble counts how many vertices
carry each partition.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

MAX_DELTA = 16


class BoundError(ValueError):
    """An argument lies outside the supported range."""


class InfeasiblePairError(ValueError):
    """A (d, f) pair can never occur in any graph with maximum degree delta."""


class GraphClass(str, enum.Enum):
    MULTIGRAPH = "multigraph"
    LOOPLESS = "loopless"
    SIMPLE = "simple"
    FOREST = "forest"
    TREE = "tree"
    CATERPILLAR = "caterpillar"
    CONNECTED_SIMPLE = "connected"

    @classmethod
    def parse(cls, name: str) -> "GraphClass":
        key = name.strip().lower().replace("_", "-")
        aliases = {
            "loopless-multigraph": "loopless",
            "connected-simple": "connected",
            "multi": "multigraph",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown graph class {name!r}; valid classes: {valid}") from None

    @property
    def acyclic(self) -> bool:
        return self in (GraphClass.FOREST, GraphClass.TREE, GraphClass.CATERPILLAR)


# ---------------------------------------------------------------------------
# Partitions and stub-stars
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Partition:
    """Multiset of positive labels, stored ascending.

    Ordering is by height first, then lexicographic on the sorted parts, which
    is the canonical variable order used everywhere else.
    """

    sort_key: tuple = field(init=False, repr=False, compare=True)
    parts: tuple[int, ...] = field(compare=False)

    def __init__(self, parts: Iterable[int]):
        parts = tuple(sorted(int(p) for p in parts))
        if not parts:
            raise ValueError("a partition needs at least one part")
        if parts[0] < 1:
            raise ValueError(f"parts must be positive, got {parts}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "sort_key", (len(parts), parts))

    def __repr__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def height(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def count(self, j: int) -> int:
        """Multiplicity of label ``j``."""
        return self.parts.count(j)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.parts)

    def fits(self, delta: int) -> bool:
        return self.height <= delta and self.parts[-1] <= delta


# A stub-star is fully described by its label partition.
StubStar = Partition


@lru_cache(maxsize=None)
def _partitions(delta: int) -> tuple[Partition, ...]:
    out = []
    for h in range(1, delta + 1):
        for combo in itertools.combinations_with_replacement(range(1, delta + 1), h):
            out.append(Partition(combo))
    return tuple(out)


def enumerate_partitions(delta: int) -> list[Partition]:
    """All partitions with at most ``delta`` parts, each part at most ``delta``.

    Grouped by height, lexicographic within a height.
    """
    if not isinstance(delta, (int, np.integer)) or not 1 <= delta <= MAX_DELTA:
        raise BoundError(f"delta must be in 1..{MAX_DELTA}, got {delta!r}")
    return list(_partitions(int(delta)))


def color_list(delta: int) -> list[tuple[int, int]]:
    """Colours (i, j), i <= j <= delta, off-diagonal first then diagonal."""
    off = [(i, j) for i in range(1, delta + 1) for j in range(i + 1, delta + 1)]
    diag = [(i, i) for i in range(1, delta + 1)]
    return off + diag


def chromatic_degree(s: Partition, color: tuple[int, int]) -> int:
    i, j = color
    d = s.height
    if d == i:
        return s.count(j)
    if d == j:
        return s.count(i)
    return 0


def multichromatic_degree(s: Partition, colors: Iterable[tuple[int, int]]) -> int:
    total = 0
    for i, j in colors:
        total += chromatic_degree(s, (min(i, j), max(i, j)))
    return total


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ensemble:
    """Multiset of stub-stars, as counts per partition."""

    counts: Mapping[Partition, int]
    delta: int

    def __post_init__(self):
        clean = {}
        for lam, c in self.counts.items():
            if not isinstance(lam, Partition):
                lam = Partition(lam)
            c = int(c)
            if c < 0:
                raise ValueError(f"negative count for {lam}")
            if c == 0:
                continue
            if not lam.fits(self.delta):
                raise BoundError(f"partition {lam} exceeds delta={self.delta}")
            clean[lam] = clean.get(lam, 0) + c
        object.__setattr__(self, "counts", dict(sorted(clean.items())))

    @classmethod
    def from_stars(cls, stars: Iterable[Partition], delta: int | None = None) -> "Ensemble":
        stars = [s if isinstance(s, Partition) else Partition(s) for s in stars]
        if delta is None:
            delta = max([1] + [max(s.height, s.parts[-1]) for s in stars])
        return cls(Counter(stars), delta)

    def __getitem__(self, lam) -> int:
        if not isinstance(lam, Partition):
            lam = Partition(lam)
        return self.counts.get(lam, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ensemble):
            return NotImplemented
        return self.counts == other.counts

    def __hash__(self) -> int:
        return hash(tuple(self.counts.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{lam!r}: {c}" for lam, c in self.counts.items())
        return f"Ensemble({{{body}}}, delta={self.delta})"

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    @property
    def degree_sum(self) -> int:
        return sum(lam.height * c for lam, c in self.counts.items())

    def stars(self) -> list[Partition]:
        """One entry per stub-star, in canonical partition order."""
        out = []
        for lam, c in self.counts.items():
            out.extend([lam] * c)
        return out

    def histogram(self) -> dict[tuple[int, int], int]:
        hist: dict[tuple[int, int], int] = {}
        for lam, c in self.counts.items():
            key = (lam.height, lam.size)
            hist[key] = hist.get(key, 0) + c
        return dict(sorted(hist.items()))

    def chromatic_sequence(self, color: tuple[int, int]) -> list[int]:
        """Chromatic degree of every stub-star (canonical order) for one colour."""
        return [chromatic_degree(s, color) for s in self.stars()]

    def bipartite_sequences(self, color: tuple[int, int]) -> tuple[list[int], list[int]]:
        """Split a colour (i, j), i < j, into the degree-i side and degree-j side."""
        i, j = color
        a = [s.count(j) for s in self.stars() if s.height == i]
        b = [s.count(i) for s in self.stars() if s.height == j]
        return a, b


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    d_list: tuple[int, ...]
    f_list: tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(v) for v in self.d_list)
        f = tuple(int(v) for v in self.f_list)
        if len(d) != len(f):
            raise ValueError(f"D has {len(d)} entries but F has {len(f)}")
        if not d:
            raise ValueError("empty instance")
        if min(d) < 1 or min(f) < 1:
            raise ValueError("degrees and neighbour sums must be positive")
        delta = max(d)
        if delta > MAX_DELTA:
            raise BoundError(f"maximum degree {delta} exceeds supported cap {MAX_DELTA}")
        for k, (dk, fk) in enumerate(zip(d, f)):
            if fk > dk * delta:
                raise InfeasiblePairError(
                    f"vertex {k}: f={fk} exceeds d*delta={dk * delta}"
                )
        object.__setattr__(self, "d_list", d)
        object.__setattr__(self, "f_list", f)

    @property
    def n(self) -> int:
        return len(self.d_list)

    @property
    def delta(self) -> int:
        return max(self.d_list)

    @cached_property
    def histogram(self) -> dict[tuple[int, int], int]:
        return dict(sorted(Counter(zip(self.d_list, self.f_list)).items()))

    @property
    def degree_sum(self) -> int:
        return sum(self.d_list)

    def key(self) -> tuple:
        """Permutation-invariant identity of the instance."""
        return tuple(sorted(self.histogram.items()))


def instance_from_lists(D: Sequence[int], F: Sequence[int]) -> Instance:
    return Instance(tuple(D), tuple(F))


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabeledGraph:
    """Vertices ``0..n-1`` and a multiset of undirected edges (loops allowed).

    Edges are normalised to ``(u, v)`` with ``u <= v`` and kept sorted.  A loop
    contributes 2 to the degree of its vertex.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]] = ()):
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u},{v}) outside 0..{n_vertices - 1}")
            norm.append((u, v) if u <= v else (v, u))
        norm.sort()
        object.__setattr__(self, "n_vertices", int(n_vertices))
        object.__setattr__(self, "edges", tuple(norm))

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Neighbour lists with multiplicity; a loop lists the vertex twice."""
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_loops(self) -> bool:
        return any(u == v for u, v in self.edges)

    def has_multi_edges(self) -> bool:
        return len(set(self.edges)) != len(self.edges)

    def is_simple(self) -> bool:
        return not self.has_loops() and not self.has_multi_edges()

    def components(self) -> list[list[int]]:
        parent = list(range(self.n_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        groups: dict[int, list[int]] = {}
        for v in range(self.n_vertices):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def n_components(self) -> int:
        return len(self.components())

    def is_connected(self) -> bool:
        return self.n_vertices > 0 and self.n_components() == 1

    def is_acyclic(self) -> bool:
        if self.has_loops() or self.has_multi_edges():
            return False
        return self.n_edges == self.n_vertices - self.n_components()

    def is_tree(self) -> bool:
        return self.is_acyclic() and self.is_connected()

    def is_caterpillar(self) -> bool:
        if not self.is_tree():
            return False
        deg = self.degrees
        spine = [v for v in range(self.n_vertices) if deg[v] > 1]
        if len(spine) <= 2:
            return True
        spine_set = set(spine)
        spine_deg = [sum(1 for w in self.adjacency[v] if w in spine_set) for v in spine]
        # the spine is a subtree, so it is a path iff no vertex has 3+ spine neighbours
        return max(spine_deg) <= 2

    def neighbor_sums(self) -> tuple[int, ...]:
        deg = self.degrees
        return tuple(sum(deg[w] for w in self.adjacency[v]) for v in range(self.n_vertices))

    def relabel(self, mapping: Sequence[int]) -> "LabeledGraph":
        """Vertex ``v`` becomes ``mapping[v]``."""
        return LabeledGraph(self.n_vertices, ((mapping[u], mapping[v]) for u, v in self.edges))


def stub_stars_from_graph(g: LabeledGraph) -> list[Partition]:
    """Per-vertex stub-star labels, in vertex order.  Isolated vertices are skipped."""
    deg = g.degrees
    return [Partition(deg[w] for w in g.adjacency[v]) for v in range(g.n_vertices) if deg[v] > 0]


def ensemble_from_graph(g: LabeledGraph, delta: int | None = None) -> Ensemble:
    if g.n_vertices == 0:
        raise ValueError("empty graph")
    maxdeg = max(g.degrees)
    if delta is None:
        delta = max(maxdeg, 1)
    if maxdeg > delta:
        raise BoundError(f"graph has degree {maxdeg} > delta={delta}")
    return Ensemble(Counter(stub_stars_from_graph(g)), delta)


def instance_from_graph(g: LabeledGraph) -> Instance:
    return Instance(g.degrees, g.neighbor_sums())


def instance_from_ensemble(e: Ensemble) -> Instance:
    stars = e.stars()
    return Instance(tuple(s.height for s in stars), tuple(s.size for s in stars))


# ---------------------------------------------------------------------------
# Colour-degree matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColorDegreeMatrix:
    colors: tuple[tuple[int, int], ...]
    stars: tuple[Partition, ...]
    values: np.ndarray

    def row(self, color: tuple[int, int]) -> tuple[int, ...]:
        i, j = color
        return tuple(int(v) for v in self.values[self.colors.index((min(i, j), max(i, j)))])

    def column_sums(self) -> np.ndarray:
        return self.values.sum(axis=0)

    def is_special(self) -> bool:
        for a, ca in enumerate(self.colors):
            for b, cb in enumerate(self.colors):
                if set(ca) & set(cb):
                    continue
                if np.any((self.values[a] != 0) & (self.values[b] != 0)):
                    return False
        return True


def color_degree_matrix(
    e: Ensemble | Sequence[Partition], delta: int | None = None
) -> ColorDegreeMatrix:
    """Rows are colours, columns stub-stars (ensemble order or the given order)."""
    if isinstance(e, Ensemble):
        stars = e.stars()
        delta = e.delta if delta is None else delta
    else:
        stars = [s if isinstance(s, Partition) else Partition(s) for s in e]
        if delta is None:
            delta = max(max(s.height, s.parts[-1]) for s in stars)
    colors = color_list(delta)
    vals = np.zeros((len(colors), len(stars)), dtype=np.int64)
    for c, color in enumerate(colors):
        for l, s in enumerate(stars):
            vals[c, l] = chromatic_degree(s, color)
    vals.setflags(write=False)
    return ColorDegreeMatrix(tuple(colors), tuple(stars), vals)
