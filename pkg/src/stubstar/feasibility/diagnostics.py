"""Compare the simple-graph Erdos-Gallai row of the linear system with the
classical sorted test.

The row in the system reads, for the degree-i class and k = 1..delta,

    t[i, k] - sum_v min(k, d_v) + tc[i, k] <= k (k + 1)

with ``t`` the top-k sum of the (i, i) chromatic sequence and ``tc`` the literal
capped recursion.  The classical test is the same row with ``k (k - 1)`` and the
exact capped top-k sum.  Each divergence is attributed by switching the two
differences on and off one at a time.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .. import seqcheck
from ..model import Ensemble, enumerate_partitions

VARIANTS = ("paper", "constant_fixed", "recursion_fixed", "classical")


def _row_ok(seq: list[int], delta: int, constant: str, recursion: str) -> bool:
    if sum(seq) % 2:
        return False
    if not any(seq):
        return True
    top = max(seq)
    counts = [sum(1 for v in seq if v == l) for l in range(1, top + 1)]
    t = seqcheck.maxsum_table(counts, k_max=delta)
    if recursion == "literal":
        tc = seqcheck.paper_capped_recursion(counts, k_max=delta)
    else:
        tc = seqcheck.maxsum_table(counts, k_max=delta, capped=True).values
    L = len(counts)
    for k in range(1, delta + 1):
        total = sum(min(k, v) for v in seq)
        c = k * (k + 1) if constant == "paper" else k * (k - 1)
        if t[L, k] - total + int(tc[L, k]) > c:
            return False
    return True


def eg_verdicts(e: Ensemble) -> dict[str, bool]:
    """Acceptance of every (i, i) sequence of ``e`` under the four row variants."""
    out = {}
    for name, constant, recursion in (
        ("paper", "paper", "literal"),
        ("constant_fixed", "classical", "literal"),
        ("recursion_fixed", "paper", "exact"),
        ("classical", "classical", "exact"),
    ):
        ok = True
        for i in range(1, e.delta + 1):
            seq = [s.count(i) for s in e.stars() if s.height == i]
            if not _row_ok(seq, e.delta, constant, recursion):
                ok = False
                break
        out[name] = ok
    return out


def classify(verdicts: dict[str, bool], sorted_eg: bool) -> str:
    """One label per ensemble; ``sorted_eg`` is the independent classical test."""
    paper, classical = verdicts["paper"], sorted_eg
    if paper == classical:
        return "agree_feasible" if paper else "agree_infeasible"
    side = "paper_only" if paper else "classical_only"
    by_constant = verdicts["constant_fixed"] == classical
    by_recursion = verdicts["recursion_fixed"] == classical
    if by_constant and by_recursion:
        cause = "either"
    elif by_constant:
        cause = "constant"
    elif by_recursion:
        cause = "recursion"
    else:
        cause = "both"
    return f"{side}:{cause}"


@dataclass
class DivergenceReport:
    delta: int
    seed: int
    labels: list[str] = field(default_factory=list)
    examples: dict[str, list[Ensemble]] = field(default_factory=dict)
    # the rewritten row with both fixes must coincide with the sorted test
    classical_mismatch: int = 0

    @property
    def counts(self) -> Counter:
        return Counter(self.labels)

    @property
    def divergences(self) -> int:
        return sum(1 for lab in self.labels if not lab.startswith("agree"))

    def to_text(self) -> str:
        lines = [
            f"EG row comparison: {len(self.labels)} ensembles, delta={self.delta}, seed={self.seed}",
            f"divergent: {self.divergences}",
            f"rewritten classical row vs sorted test mismatches: {self.classical_mismatch}",
        ]
        for lab, cnt in sorted(self.counts.items()):
            lines.append(f"  {lab}: {cnt}")
        for lab, exs in sorted(self.examples.items()):
            for ex in exs:
                lines.append(f"example {lab}: {ex!r}")
        return "\n".join(lines)


def random_ensemble(rng: np.random.Generator, delta: int, n_max: int) -> Ensemble:
    parts = enumerate_partitions(delta)
    n = int(rng.integers(1, n_max + 1))
    picks = rng.integers(0, len(parts), size=n)
    return Ensemble.from_stars([parts[p] for p in picks], delta)


def eg_divergence_report(
    n_ensembles: int = 500, delta: int = 4, seed: int = 0, n_max: int = 16, keep: int = 3
) -> DivergenceReport:
    """Run the comparison on random ensembles.

    Ensembles are drawn with stars concentrated on one degree class half of the
    time, so the (i, i) sequences are long enough for the rows to matter.
    """
    rng = np.random.default_rng(seed)
    rep = DivergenceReport(delta, seed)
    parts = enumerate_partitions(delta)
    for _ in range(n_ensembles):
        if rng.random() < 0.5:
            i = int(rng.integers(1, delta + 1))
            pool = [p for p in parts if p.height == i]
            n = int(rng.integers(1, n_max + 1))
            e = Ensemble.from_stars([pool[k] for k in rng.integers(0, len(pool), size=n)], delta)
        else:
            e = random_ensemble(rng, delta, n_max)
        v = eg_verdicts(e)
        sorted_eg = all(
            seqcheck.check_erdos_gallai([s.count(i) for s in e.stars() if s.height == i], k_limit=delta)
            for i in range(1, delta + 1)
        )
        if v["classical"] != sorted_eg:
            rep.classical_mismatch += 1
        lab = classify(v, sorted_eg)
        rep.labels.append(lab)
        if not lab.startswith("agree"):
            bucket = rep.examples.setdefault(lab, [])
            if len(bucket) < keep:
                bucket.append(e)
    return rep
