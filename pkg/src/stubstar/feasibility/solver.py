"""Depth-first branch-and-propagate search over bounded integer variables.

Propagation is integer bound consistency on every linear row, repeated to a
fixpoint.  Branching takes the first unfixed variable in declaration order and
explores its values in ascending order (wide domains are bisected, lower half
first), so the first solution is the lexicographically smallest one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .relax import Relaxation
from .system import Assignment, LinearSystem


# domains at least this wide are bisected instead of enumerated
SPLIT_WIDTH = 4


class SearchLimit(RuntimeError):
    """The node budget ran out before the search finished."""


@dataclass
class _Compiled:
    names: list[str]
    lo: np.ndarray
    hi: np.ndarray
    m: int
    rows: np.ndarray
    b: np.ndarray
    # positive / negative coefficient entries, sorted by column for reduceat
    pos_r: np.ndarray
    pos_c: np.ndarray
    pos_a: np.ndarray
    pos_starts: np.ndarray
    pos_cols: np.ndarray
    neg_r: np.ndarray
    neg_c: np.ndarray
    neg_a: np.ndarray
    neg_starts: np.ndarray
    neg_cols: np.ndarray
    all_r: np.ndarray
    all_c: np.ndarray
    all_a: np.ndarray
    checks: list
    check_watch: list


def _split(r, c, a, sign):
    mask = a > 0 if sign > 0 else a < 0
    r, c, a = r[mask], c[mask], a[mask]
    order = np.argsort(c, kind="stable")
    r, c, a = r[order], c[order], a[order]
    if len(c):
        starts = np.flatnonzero(np.r_[True, c[1:] != c[:-1]])
        cols = c[starts]
    else:
        starts = np.zeros(0, dtype=np.int64)
        cols = np.zeros(0, dtype=np.int64)
    return r, c, a, starts, cols


def compile_system(system: LinearSystem) -> _Compiled:
    if system._compiled is not None:
        return system._compiled
    names = [v.name for v in system.variables]
    idx = {n: k for k, n in enumerate(names)}
    lo = np.array([v.lo for v in system.variables], dtype=np.int64)
    hi = np.array([v.hi for v in system.variables], dtype=np.int64)
    rr, cc, aa, bb = [], [], [], []
    m = 0
    for con in system.constraints:
        signs = {"<=": (1,), ">=": (-1,), "==": (1, -1)}[con.rel]
        for s in signs:
            for n, c in con.terms:
                rr.append(m)
                cc.append(idx[n])
                aa.append(s * c)
            bb.append(s * con.rhs)
            m += 1
    rows = np.array(rr, dtype=np.int64)
    cols = np.array(cc, dtype=np.int64)
    vals = np.array(aa, dtype=np.int64)
    pos = _split(rows, cols, vals, +1)
    neg = _split(rows, cols, vals, -1)
    comp = _Compiled(
        names, lo, hi, m, rows, np.array(bb, dtype=np.int64),
        *pos, *neg, rows, cols, vals,
        list(system.checks),
        [np.array([idx[n] for n in chk.watch], dtype=np.int64) for chk in system.checks],
    )
    system._compiled = comp
    return comp


def propagate(comp: _Compiled, lo: np.ndarray, hi: np.ndarray) -> bool:
    """Tighten ``lo``/``hi`` in place; False on a proven empty domain."""
    if comp.m == 0:
        return bool(np.all(lo <= hi))
    while True:
        a = comp.all_a
        c = comp.all_c
        contrib = np.where(a > 0, a * lo[c], a * hi[c])
        minact = np.bincount(comp.all_r, weights=contrib, minlength=comp.m)
        minact = np.rint(minact).astype(np.int64)
        slack = comp.b - minact
        if np.any(slack < 0):
            return False
        changed = False
        if len(comp.pos_a):
            cand = lo[comp.pos_c] + slack[comp.pos_r] // comp.pos_a
            best = np.minimum.reduceat(cand, comp.pos_starts)
            cur = hi[comp.pos_cols]
            upd = best < cur
            if np.any(upd):
                hi[comp.pos_cols[upd]] = best[upd]
                changed = True
        if len(comp.neg_a):
            cand = hi[comp.neg_c] - slack[comp.neg_r] // (-comp.neg_a)
            best = np.maximum.reduceat(cand, comp.neg_starts)
            cur = lo[comp.neg_cols]
            upd = best > cur
            if np.any(upd):
                lo[comp.neg_cols[upd]] = best[upd]
                changed = True
        if np.any(lo > hi):
            return False
        if not changed:
            return True


@dataclass
class SearchStats:
    nodes: int = 0
    check_calls: int = 0


class _Search:
    def __init__(self, system: LinearSystem, node_limit: int | None = None, project=None, relax=False):
        self.system = system
        self.bound_checks = [fn for _, fn in system.bound_checks]
        self.comp = compile_system(system)
        self.node_limit = node_limit
        self.stats = SearchStats()
        self.relaxation = None
        if relax:
            self.relaxation = Relaxation(self.comp, system.meta.get("relaxation_rows"))
            self.bound_checks.append(self.relaxation.feasible)
        n = len(self.comp.names)
        if project is None:
            self.proj_mask = np.ones(n, dtype=bool)
        else:
            self.proj_mask = np.zeros(n, dtype=bool)
            for name in project:
                self.proj_mask[system.index(name)] = True

    def _checks_ok(self, lo, hi, done):
        for fn in self.bound_checks:
            if not fn(lo, hi):
                return False
        fixed = lo == hi
        for k, chk in enumerate(self.comp.checks):
            if done[k]:
                continue
            w = self.comp.check_watch[k]
            if np.all(fixed[w]):
                self.stats.check_calls += 1
                if not chk.fn(lo):
                    return False
                done[k] = True
        return True

    def _tick(self):
        self.stats.nodes += 1
        if self.node_limit is not None and self.stats.nodes > self.node_limit:
            raise SearchLimit(f"node limit {self.node_limit} exceeded")

    def solutions(self, projected_only: bool = False) -> Iterator[np.ndarray]:
        """Yield value vectors.  With ``projected_only``, one completion per
        distinct assignment of the projected variables."""
        lo = self.comp.lo.copy()
        hi = self.comp.hi.copy()
        done = np.zeros(len(self.comp.checks), dtype=bool)
        self._tick()
        if not propagate(self.comp, lo, hi) or not self._checks_ok(lo, hi, done):
            return
        yield from self._dfs(lo, hi, done, projected_only)

    def _dfs(self, lo, hi, done, projected_only):
        free = lo < hi
        if projected_only:
            pfree = np.flatnonzero(free & self.proj_mask)
            if len(pfree) == 0:
                sol = next(self._dfs(lo, hi, done, False), None)
                if sol is not None:
                    yield sol
                return
            j = pfree[0]
        else:
            fidx = np.flatnonzero(free)
            if len(fidx) == 0:
                yield lo.copy()
                return
            j = fidx[0]
        branches = _branches(int(lo[j]), int(hi[j]))
        if self.relaxation is not None and len(branches) == 2:
            # jump to the smallest value the relaxation allows, then try it alone
            low = self.relaxation.min_value(lo, hi, j)
            if low is None:
                return
            branches = [(low, low), (low + 1, int(hi[j]))] if low < hi[j] else [(low, low)]
        for a, b in branches:
            self._tick()
            clo, chi = lo.copy(), hi.copy()
            clo[j], chi[j] = a, b
            if not propagate(self.comp, clo, chi):
                continue
            cdone = done.copy()
            if not self._checks_ok(clo, chi, cdone):
                continue
            yield from self._dfs(clo, chi, cdone, projected_only)


def _branches(lo: int, hi: int):
    """Small domains are split into single values, large ones into halves.

    The lower part always comes first, so the first solution found is the
    same as with plain ascending value enumeration.
    """
    if hi - lo < SPLIT_WIDTH:
        return [(v, v) for v in range(lo, hi + 1)]
    mid = (lo + hi) // 2
    return [(lo, mid), (mid + 1, hi)]


def _to_assignment(comp, vec) -> Assignment:
    return {n: int(v) for n, v in zip(comp.names, vec)}


def solve_first(
    system: LinearSystem, node_limit: int | None = None, relax: bool = True
) -> Assignment | None:
    """First satisfying assignment in search order, or ``None`` if infeasible.

    ``relax`` adds LP-relaxation pruning at every node; it is sound, so the
    answer is the same either way, only the node count changes.  A system
    carrying ``meta["separator"]`` gets violated rows appended and is re-solved
    until the separator adds nothing.
    """
    separator = system.meta.get("separator")
    while True:
        search = _Search(system, node_limit, relax=relax)
        vec = next(search.solutions(), None)
        system.meta["last_stats"] = search.stats
        if vec is None:
            return None
        sol = _to_assignment(search.comp, vec)
        if separator is None or not separator(sol):
            return sol


@dataclass
class Enumeration:
    solutions: list[Assignment] = field(default_factory=list)
    truncated: bool = False
    projection: tuple[str, ...] = ()

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    @property
    def count_label(self) -> str:
        return f">={len(self.solutions)}" if self.truncated else str(len(self.solutions))


def enumerate_all(
    system: LinearSystem,
    cap: int = 10_000,
    project: Sequence[str] | None = None,
    node_limit: int | None = None,
) -> Enumeration:
    """All solutions, distinct on the projected variables, up to ``cap``.

    Each entry is a full assignment (the first completion found for that
    projection).  ``project`` defaults to ``system.projection`` or all variables.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if project is None:
        project = system.projection
    separator = system.meta.get("separator")
    while True:
        search = _Search(system, node_limit, project)
        out = Enumeration(projection=tuple(project) if project else tuple(search.comp.names))
        for vec in search.solutions(projected_only=project is not None):
            if len(out.solutions) >= cap:
                out.truncated = True
                break
            out.solutions.append(_to_assignment(search.comp, vec))
        system.meta["last_stats"] = search.stats
        if separator is None or not sum(separator(sol) for sol in out.solutions):
            return out
