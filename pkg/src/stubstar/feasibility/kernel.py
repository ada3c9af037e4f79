"""Per-delta lookup arrays shared by system builders, checks and counters."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from ..model import Partition, chromatic_degree, color_list, enumerate_partitions

# Subset inequalities are tabulated eagerly up to this many colours (delta=4).
EAGER_COLORS = 10


class Kernel:
    """Arrays indexed by the canonical partition order for one ``delta``.

    ``N[p, j-1]``    multiplicity of label j in partition p
    ``CD[p, c]``     chromatic degree of partition p for colour c
    ``subsets``      bit masks over colours (all nonempty ones when eager)
    ``DI[s, p]``     multichromatic degree of partition p for subset s
    """

    def __init__(self, delta: int):
        self.delta = delta
        self.partitions: list[Partition] = enumerate_partitions(delta)
        self.index = {lam: k for k, lam in enumerate(self.partitions)}
        P = len(self.partitions)
        self.heights = np.array([lam.height for lam in self.partitions], dtype=np.int64)
        self.sizes = np.array([lam.size for lam in self.partitions], dtype=np.int64)
        self.N = np.zeros((P, delta), dtype=np.int64)
        for p, lam in enumerate(self.partitions):
            for j in lam.parts:
                self.N[p, j - 1] += 1
        self.colors = color_list(delta)
        self.color_index = {c: k for k, c in enumerate(self.colors)}
        self.CD = np.array(
            [[chromatic_degree(lam, c) for c in self.colors] for lam in self.partitions],
            dtype=np.int64,
        )
        # colour c touches degrees {i, j}; used for connectivity of colour sets
        self.color_degrees = [frozenset(c) for c in self.colors]
        self.eager = len(self.colors) <= EAGER_COLORS
        if self.eager:
            masks = np.arange(1, 1 << len(self.colors), dtype=np.int64)
            self.subsets = masks
            bits = ((masks[:, None] >> np.arange(len(self.colors))) & 1).astype(np.int64)
            self.subset_bits = bits
            self.DI = bits @ self.CD.T
            self.DI_pos = (self.DI > 0).astype(np.int64)
            self.subset_maxdeg = np.array(
                [max(max(self.colors[c]) for c in np.flatnonzero(row)) for row in bits],
                dtype=np.int64,
            )

    def partition_var(self, lam: Partition) -> str:
        return "x_" + "_".join(map(str, lam.parts))

    # -- per-assignment quantities ----------------------------------------

    def stub_counts(self, x: np.ndarray) -> np.ndarray:
        """``c[i-1, j-1]``: stubs labelled j on degree-i stub-stars."""
        c = np.zeros((self.delta, self.delta), dtype=np.int64)
        for i in range(1, self.delta + 1):
            sel = self.heights == i
            c[i - 1] = x[sel] @ self.N[sel]
        return c

    def multigraph_ok(self, x: np.ndarray) -> bool:
        c = self.stub_counts(x)
        if np.any(np.diag(c) % 2):
            return False
        return bool(np.array_equal(c, c.T))

    def forest_violations(self, x: np.ndarray, max_degree: int | None = None) -> list[int]:
        """Colour-set masks whose multichromatic sequence is not forest realizable."""
        if self.eager:
            rows = slice(None)
            if max_degree is not None:
                rows = self.subset_maxdeg <= max_degree
            S = self.DI[rows] @ x
            V = self.DI_pos[rows] @ x
            bad = (S > 0) & (S > 2 * V - 2)
            return [int(m) for m in self.subsets[rows][bad]]
        return self._forest_violations_lazy(x, max_degree)

    def _forest_violations_lazy(self, x, max_degree=None):
        # only colour sets that are connected through shared degrees and carry
        # stubs can be violated; other sets split into independent parts
        live = [c for c in range(len(self.colors)) if self.CD[:, c] @ x > 0]
        if max_degree is not None:
            live = [c for c in live if max(self.colors[c]) <= max_degree]
        bad = []
        for r in range(1, len(live) + 1):
            for combo in combinations(live, r):
                if not self._connected(combo):
                    continue
                dI = self.CD[:, list(combo)].sum(axis=1)
                S = int(dI @ x)
                V = int((dI > 0) @ x)
                if S > 0 and S > 2 * V - 2:
                    bad.append(sum(1 << c for c in combo))
        return bad

    def _connected(self, combo) -> bool:
        groups = [set(self.color_degrees[c]) for c in combo]
        merged = [groups[0]]
        rest = groups[1:]
        changed = True
        while changed and rest:
            changed = False
            for g in list(rest):
                if any(g & m for m in merged):
                    merged.append(g)
                    rest.remove(g)
                    changed = True
        return not rest

    def mask_colors(self, mask: int) -> list[tuple[int, int]]:
        return [self.colors[c] for c in range(len(self.colors)) if mask >> c & 1]


@lru_cache(maxsize=None)
def kernel(delta: int) -> Kernel:
    return Kernel(delta)
