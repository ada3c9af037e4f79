"""Text formats: instance files, edge lists, DOT."""

from __future__ import annotations

from pathlib import Path
from typing import TextIO

from .model import Instance, LabeledGraph, instance_from_lists


class ParseError(ValueError):
    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


def _two_ints(raw: str, source: str, lineno: int, what: str) -> tuple[int, int]:
    fields = raw.split()
    if len(fields) != 2:
        raise ParseError(source, lineno, f"expected '{what}', got {raw.strip()!r}")
    try:
        a, b = int(fields[0]), int(fields[1])
    except ValueError:
        raise ParseError(source, lineno, f"not an integer pair: {raw.strip()!r}") from None
    return a, b


def parse_instance(text: str, source: str = "<string>") -> Instance:
    """One vertex per line, ``d f``; ``#`` starts a comment."""
    D, F, lines = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        if not raw.strip():
            continue
        d, f = _two_ints(raw, source, lineno, "d f")
        if d < 1 or f < 1:
            raise ParseError(source, lineno, f"degree and neighbour sum must be positive, got {d} {f}")
        D.append(d)
        F.append(f)
        lines.append(lineno)
    if not D:
        raise ParseError(source, 0, "no vertices")
    delta = max(D)
    for d, f, lineno in zip(D, F, lines):
        if f > d * delta:
            raise ParseError(source, lineno, f"f={f} exceeds d*delta={d * delta}; no graph has this pair")
    try:
        return instance_from_lists(D, F)
    except ValueError as exc:
        raise ParseError(source, 0, str(exc)) from None


def read_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(), str(path))


def format_instance(inst: Instance, comment: str | None = None) -> str:
    lines = [f"# {c}" for c in comment.splitlines()] if comment else []
    lines.extend(f"{d} {f}" for d, f in zip(inst.d_list, inst.f_list))
    return "\n".join(lines) + "\n"


def write_instance(inst: Instance, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_instance(inst, comment))


def format_edge_list(g: LabeledGraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges)


def parse_edge_list(text: str, n: int | None = None, source: str = "<string>") -> LabeledGraph:
    """Edge lines ``u v`` (0-based).  Without ``n`` the vertex count is max id + 1."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        if not raw.strip():
            continue
        u, v = _two_ints(raw, source, lineno, "u v")
        if u < 0 or v < 0 or (n is not None and max(u, v) >= n):
            raise ParseError(source, lineno, f"vertex id out of range in {raw.strip()!r}")
        edges.append((u, v))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return LabeledGraph(n, edges)


def format_dot(g: LabeledGraph, name: str = "G") -> str:
    deg = g.degrees
    lines = [f"graph {name} {{"]
    for v in range(g.n_vertices):
        lines.append(f'  {v} [label="{v}\\nd={deg[v]}"];')
    for u, v in g.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_graph(g: LabeledGraph, out: TextIO, dot: bool = False) -> None:
    out.write(format_dot(g) if dot else format_edge_list(g))
