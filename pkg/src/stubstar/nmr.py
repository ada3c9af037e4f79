"""Turn a digested carbon NMR peak table into a (D, F) instance.

A peak from carbons carrying k hydrogens, split into l + 1 parts, stands for
carbons of skeletal degree 4 - k whose neighbours carry l hydrogens in total,
so their neighbour-degree sum is 4 (4 - k) - l.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .io import ParseError
from .model import Instance, instance_from_lists


class PeakError(ValueError):
    pass


@dataclass(frozen=True)
class NmrPeak:
    k: int
    l: int
    count: int = 1

    @property
    def degree(self) -> int:
        return 4 - self.k

    @property
    def neighbor_sum(self) -> int:
        return 4 * (4 - self.k) - self.l

    def problems(self) -> list[str]:
        out = []
        if not 0 <= self.k <= 3:
            out.append(f"k={self.k} outside 0..3")
        if self.l < 0:
            out.append(f"l={self.l} is negative")
        if self.count < 1:
            out.append(f"count={self.count} is not positive")
        if not out and self.neighbor_sum < self.degree:
            out.append(f"l={self.l} leaves neighbour sum {self.neighbor_sum} below degree {self.degree}")
        return out


def nmr_to_instance(peaks: list[NmrPeak]) -> Instance:
    if not peaks:
        raise PeakError("empty peak list")
    bad = [f"peak {p}: {'; '.join(p.problems())}" for p in peaks if p.problems()]
    if bad:
        raise PeakError("\n".join(bad))
    D, F = [], []
    for p in peaks:
        D.extend([p.degree] * p.count)
        F.extend([p.neighbor_sum] * p.count)
    return instance_from_lists(D, F)


def parse_peaks(text: str, source: str = "<string>") -> list[NmrPeak]:
    """Lines ``k l [count]``; ``#`` starts a comment."""
    peaks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        if not raw.strip():
            continue
        fields = raw.split()
        if len(fields) not in (2, 3):
            raise ParseError(source, lineno, f"expected 'k l [count]', got {raw.strip()!r}")
        try:
            vals = [int(v) for v in fields]
        except ValueError:
            raise ParseError(source, lineno, f"not integers: {raw.strip()!r}") from None
        peak = NmrPeak(*vals)
        if peak.problems():
            raise ParseError(source, lineno, "; ".join(peak.problems()))
        peaks.append(peak)
    return peaks


_FORMULA = re.compile(r"^C(\d*)H(\d+)$")


def formula_hint(formula: str, n_carbons: int | None = None) -> str:
    """Informational reading of a CnHm formula: m = 2n + 2 means a tree skeleton."""
    m = _FORMULA.match(formula.strip())
    if not m:
        raise ValueError(f"formula {formula!r} is not of the form CnHm")
    n = int(m.group(1) or 1)
    h = int(m.group(2))
    lines = []
    if n_carbons is not None and n_carbons != n:
        lines.append(f"warning: formula has {n} carbons but the instance has {n_carbons}")
    if h == 2 * n + 2:
        lines.append(f"{formula}: saturated acyclic, the skeleton is a tree (target class: tree)")
    elif h < 2 * n + 2 and h % 2 == 0:
        extra = (2 * n + 2 - h) // 2
        lines.append(f"{formula}: {extra} extra bond(s) beyond a tree (rings or multiple bonds)")
    else:
        lines.append(f"{formula}: hydrogen count {h} is not possible for {n} carbons")
    return "\n".join(lines)
