"""Timing and counting benchmarks on random trees.

For every size n, ``trials`` random trees with maximum degree 4 are drawn
(trial t uses seed ``seed + t``) and turned into (D, F) instances.  Time mode
measures build + first solution + reconstruction of a tree in milliseconds;
count mode counts the feasible tree ensembles of the instance.
"""

from __future__ import annotations

import os
import re
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .assembler import realize
from .feasibility import build_system, solve_first
from .feasibility.count import count_ensembles
from .model import GraphClass, instance_from_graph
from .oracle import random_tree

CSV_HEADER = "n,mean,stddev,min,max"


@dataclass
class BenchRecord:
    n: int
    trials: int
    mean: float
    stddev: float
    min: float
    max: float
    seed: int
    truncated: int = 0

    def csv(self) -> str:
        return f"{self.n},{self.mean:.6g},{self.stddev:.6g},{self.min:.6g},{self.max:.6g}"


def parse_sizes(text: str) -> list[int]:
    """``a..b:step`` (inclusive) or a comma list, e.g. ``100..1000:100`` or ``10,20``."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        m = re.fullmatch(r"(\d+)\.\.(\d+)(?::(\d+))?", chunk)
        if m:
            a, b, step = int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)
            if step < 1 or a > b:
                raise ValueError(f"bad size range {chunk!r}")
            out.extend(range(a, b + 1, step))
        elif chunk.isdigit():
            out.append(int(chunk))
        else:
            raise ValueError(f"bad size spec {chunk!r}")
    if not out or min(out) < 1:
        raise ValueError("sizes must be positive")
    return out


def workers(default: int | None = None) -> int:
    env = os.environ.get("STUBSTAR_THREADS")
    if env:
        return max(1, int(env))
    return default if default is not None else (os.cpu_count() or 1)


def time_trial(n: int, seed: int) -> float:
    inst = instance_from_graph(random_tree(n, 4, seed))
    t0 = time.perf_counter()
    sysm = build_system(inst, GraphClass.TREE)
    sol = solve_first(sysm)
    if sol is None:
        raise RuntimeError(f"tree instance n={n} seed={seed} reported infeasible")
    realize(sysm.ensemble(sol), GraphClass.TREE)
    return 1000.0 * (time.perf_counter() - t0)


def count_trial(n: int, seed: int, cap: int | None = None) -> tuple[int, bool]:
    inst = instance_from_graph(random_tree(n, 4, seed))
    res = count_ensembles(inst, GraphClass.TREE, cap=cap)
    return res.count, res.truncated


def _summary(n, values, seed, truncated=0) -> BenchRecord:
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return BenchRecord(n, len(values), statistics.fmean(values), sd, min(values), max(values), seed, truncated)


def _map(fn, args, n_workers):
    if n_workers <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(n_workers) as pool:
        return list(pool.map(fn, *zip(*args)))


def run_time(sizes, trials: int = 100, seed: int = 0, n_workers: int | None = None, out=None):
    """Time mode.  Runs sequentially unless STUBSTAR_THREADS asks otherwise,
    so trials do not compete for cores while being timed."""
    n_workers = workers(1) if n_workers is None else n_workers
    records = []
    for n in sizes:
        vals = _map(time_trial, [(n, seed + t) for t in range(trials)], n_workers)
        rec = _summary(n, vals, seed)
        records.append(rec)
        if out is not None:
            print(rec.csv(), file=out, flush=True)
    return records


def run_count(sizes, trials: int = 100, seed: int = 0, cap: int | None = None, n_workers=None, out=None):
    n_workers = workers() if n_workers is None else n_workers
    records = []
    for n in sizes:
        res = _map(count_trial, [(n, seed + t, cap) for t in range(trials)], n_workers)
        rec = _summary(n, [c for c, _ in res], seed, sum(1 for _, tr in res if tr))
        records.append(rec)
        if out is not None:
            print(rec.csv(), file=out, flush=True)
            if rec.truncated:
                print(f"n={n}: {rec.truncated} trial(s) hit the cap; mean is a lower bound", file=sys.stderr)
    return records
