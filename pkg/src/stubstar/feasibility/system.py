"""Bounded integer linear systems and the big-M min/max encodings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ..model import BoundError

Assignment = dict  # variable name -> int


class LinExpr:
    """Sparse integer linear expression ``sum(coef * var) + const``."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Mapping[str, int] | None = None, const: int = 0):
        self.terms = {k: int(v) for k, v in (terms or {}).items() if v}
        self.const = int(const)

    @classmethod
    def of(cls, value) -> "LinExpr":
        if isinstance(value, LinExpr):
            return value
        if isinstance(value, str):
            return cls({value: 1})
        return cls(const=int(value))

    def __add__(self, other):
        other = LinExpr.of(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return LinExpr(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({k: -v for k, v in self.terms.items()}, -self.const)

    def __sub__(self, other):
        return self + (-LinExpr.of(other))

    def __rsub__(self, other):
        return LinExpr.of(other) - self

    def __mul__(self, k: int):
        return LinExpr({n: v * int(k) for n, v in self.terms.items()}, self.const * int(k))

    __rmul__ = __mul__

    def value(self, assignment: Mapping[str, int]) -> int:
        return self.const + sum(c * assignment[n] for n, c in self.terms.items())

    def __repr__(self) -> str:
        parts = [f"{c:+d} {n}" for n, c in self.terms.items()]
        if self.const or not parts:
            parts.append(f"{self.const:+d}")
        return " ".join(parts)


@dataclass(frozen=True)
class Variable:
    name: str
    lo: int
    hi: int


@dataclass(frozen=True)
class Constraint:
    terms: tuple[tuple[str, int], ...]
    rel: str  # "<=", "==", ">="
    rhs: int
    label: str = ""

    def holds(self, assignment: Mapping[str, int]) -> bool:
        lhs = sum(c * assignment[n] for n, c in self.terms)
        if self.rel == "<=":
            return lhs <= self.rhs
        if self.rel == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class Check:
    """Non-linear side condition evaluated once all ``watch`` variables are fixed.

    ``fn`` receives the solver's value vector (indexed like ``system.variables``).
    """

    name: str
    watch: tuple[str, ...]
    fn: Callable[[np.ndarray], bool]


@dataclass(frozen=True)
class MinMaxLink:
    """Record of one big-M min/max encoding, for auditing solutions."""

    kind: str  # "min" or "max"
    z: str
    b: str
    x: LinExpr
    y: LinExpr


class LinearSystem:
    def __init__(self, name: str = "system"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.checks: list[Check] = []
        # (name, fn(lo, hi) -> bool): necessary conditions tested on bounds at every node
        self.bound_checks: list[tuple[str, object]] = []
        self.links: list[MinMaxLink] = []
        self.projection: tuple[str, ...] | None = None
        self.meta: dict = {}
        self._index: dict[str, int] = {}
        self._compiled = None

    # -- construction -----------------------------------------------------

    def add_var(self, name: str, lo: int, hi: int) -> LinExpr:
        if name in self._index:
            raise ValueError(f"duplicate variable {name}")
        lo, hi = int(lo), int(hi)
        self._index[name] = len(self.variables)
        self.variables.append(Variable(name, lo, hi))
        self._compiled = None
        return LinExpr({name: 1})

    def var(self, name: str) -> Variable:
        return self.variables[self._index[name]]

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def add(self, expr, rel: str, rhs=0, label: str = "") -> Constraint:
        if rel not in ("<=", "==", ">="):
            raise ValueError(f"bad relation {rel!r}")
        expr = LinExpr.of(expr) - LinExpr.of(rhs)
        for n in expr.terms:
            if n not in self._index:
                raise KeyError(f"constraint {label!r} references undeclared variable {n}")
        con = Constraint(tuple(expr.terms.items()), rel, -expr.const, label)
        self.constraints.append(con)
        self._compiled = None
        return con

    def add_check(self, name: str, watch: Iterable[str], fn) -> None:
        watch = tuple(watch)
        for n in watch:
            if n not in self._index:
                raise KeyError(f"check {name!r} watches undeclared variable {n}")
        self.checks.append(Check(name, watch, fn))
        self._compiled = None

    def add_bound_check(self, name: str, fn) -> None:
        """Register ``fn(lo, hi)``; returning False proves the node has no solution."""
        self.bound_checks.append((name, fn))

    # -- evaluation -------------------------------------------------------

    def violations(self, assignment: Mapping[str, int]) -> list[str]:
        """Everything an assignment breaks: bounds, constraints, checks."""
        bad = []
        for v in self.variables:
            val = assignment.get(v.name)
            if val is None:
                bad.append(f"{v.name} unassigned")
            elif not v.lo <= val <= v.hi:
                bad.append(f"{v.name}={val} outside [{v.lo},{v.hi}]")
        if bad:
            return bad
        for c in self.constraints:
            if not c.holds(assignment):
                bad.append(c.label or repr(c))
        if self.checks:
            vec = np.array([assignment[v.name] for v in self.variables], dtype=np.int64)
            for chk in self.checks:
                if not chk.fn(vec):
                    bad.append(f"check {chk.name}")
        return bad

    def is_satisfied(self, assignment: Mapping[str, int]) -> bool:
        return not self.violations(assignment)

    # -- export -----------------------------------------------------------

    def to_lp(self) -> str:
        """CPLEX-LP style text; side checks are listed as comments."""

        def fmt(terms):
            out = []
            for n, c in terms:
                sign = "+" if c >= 0 else "-"
                out.append(f"{sign} {abs(c)} {n}")
            s = " ".join(out) if out else "0 dummy"
            return s[2:] if s.startswith("+ ") else s

        lines = [f"\\ {self.name}", "Minimize", " obj: 0", "Subject To"]
        for k, c in enumerate(self.constraints):
            rel = {"<=": "<=", ">=": ">=", "==": "="}[c.rel]
            label = "".join(ch if ch.isalnum() or ch == "_" else "_" for ch in c.label) or "c"
            lines.append(f" {label}_{k}: {fmt(c.terms)} {rel} {c.rhs}")
        lines.append("Bounds")
        for v in self.variables:
            lines.append(f" {v.lo} <= {v.name} <= {v.hi}")
        lines.append("General")
        lines.append(" " + " ".join(v.name for v in self.variables))
        for chk in self.checks:
            lines.append(f"\\ side check (not linear): {chk.name}")
        lines.append("End")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# min / max through one binary and a big-M constant
# ---------------------------------------------------------------------------


def expr_range(system: LinearSystem, expr: LinExpr) -> tuple[int, int]:
    lo = hi = expr.const
    for n, c in expr.terms.items():
        v = system.var(n)
        if c > 0:
            lo += c * v.lo
            hi += c * v.hi
        else:
            lo += c * v.hi
            hi += c * v.lo
    return lo, hi


def _encode(system, kind, x, y, M, name):
    x, y = LinExpr.of(x), LinExpr.of(y)
    dlo, dhi = expr_range(system, x - y)
    need = max(abs(dlo), abs(dhi))
    if M < need:
        raise BoundError(f"M={M} is smaller than sup|x-y|={need} for {name}")
    xlo, xhi = expr_range(system, x)
    ylo, yhi = expr_range(system, y)
    if kind == "min":
        zlo, zhi = min(xlo, ylo), min(xhi, yhi)
    else:
        zlo, zhi = max(xlo, ylo), max(xhi, yhi)
    z = system.add_var(name, zlo, zhi)
    b = system.add_var(name + "_b", 0, 1)
    if kind == "min":
        system.add(z - x, "<=", 0, f"{name}_le_x")
        system.add(z - y, "<=", 0, f"{name}_le_y")
        system.add(z - x + M * b, ">=", 0, f"{name}_ge_x")
        system.add(z - y - M * b, ">=", -M, f"{name}_ge_y")
    else:
        system.add(z - x, ">=", 0, f"{name}_ge_x")
        system.add(z - y, ">=", 0, f"{name}_ge_y")
        system.add(z - x - M * b, "<=", 0, f"{name}_le_x")
        system.add(z - y + M * b, "<=", M, f"{name}_le_y")
    system.links.append(MinMaxLink(kind, name, name + "_b", x, y))
    return z


def encode_min(system: LinearSystem, x, y, M: int, name: str) -> LinExpr:
    """Add ``z = min(x, y)`` with binary ``name_b``; returns ``z``."""
    return _encode(system, "min", x, y, M, name)


def encode_max(system: LinearSystem, x, y, M: int, name: str) -> LinExpr:
    """Add ``z = max(x, y)`` with binary ``name_b``; returns ``z``."""
    return _encode(system, "max", x, y, M, name)


def audit_links(system: LinearSystem, assignment: Mapping[str, int]) -> list[str]:
    """Names of encoded z variables that differ from the true min/max."""
    bad = []
    for link in system.links:
        xv, yv = link.x.value(assignment), link.y.value(assignment)
        want = min(xv, yv) if link.kind == "min" else max(xv, yv)
        if assignment[link.z] != want:
            bad.append(link.z)
    return bad
