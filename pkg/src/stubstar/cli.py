"""Command-line front end.

    stubstar decide <class> <instance>        FEASIBLE / INFEASIBLE
    stubstar construct <class> <instance>     edge list (or DOT with --dot)
    stubstar count <class> <instance>         number of feasible ensembles
    stubstar nmr <peaks>                      peak table -> instance file
    stubstar bench time|count --sizes ...     CSV n,mean,stddev,min,max
    stubstar eg-report                        EG row divergence report

Exit codes: 0 feasible (or success), 1 infeasible, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench, io
from .assembler import NotConnected, construct
from .feasibility import Encoding, build_system, enumerate_all, solve_first
from .feasibility.count import FAST_CLASSES, count_ensembles
from .model import GraphClass, Instance
from .nmr import PeakError, formula_hint, nmr_to_instance, parse_peaks

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _class(name: str) -> GraphClass:
    try:
        return GraphClass.parse(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(args) -> Instance:
    path = Path(args.instance)
    if not path.exists():
        raise UsageError(f"{path}: no such file")
    if args.peaks:
        return nmr_to_instance(parse_peaks(path.read_text(), str(path)))
    return io.read_instance(path)


def _hint(args, inst: Instance) -> None:
    if getattr(args, "formula", None):
        print(formula_hint(args.formula, inst.n), file=sys.stderr)


def _dump_lp(args, sysm) -> None:
    if args.lp:
        Path(args.lp).write_text(sysm.to_lp())


def cmd_decide(args) -> int:
    inst = _load(args)
    _hint(args, inst)
    sysm = build_system(inst, args.cls, args.encoding)
    _dump_lp(args, sysm)
    sol = solve_first(sysm)
    if sol is None:
        print("INFEASIBLE")
        return EXIT_INFEASIBLE
    print("FEASIBLE")
    if args.verbose:
        print(sysm.ensemble(sol))
    return EXIT_OK


def cmd_construct(args) -> int:
    inst = _load(args)
    _hint(args, inst)
    if args.lp:
        _dump_lp(args, build_system(inst, args.cls, args.encoding))
    try:
        g = construct(inst, args.cls, args.encoding)
    except NotConnected as exc:
        print(f"no connected realization reached: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if g is None:
        print("INFEASIBLE", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        io.write_graph(g, out, dot=args.dot)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def cmd_count(args) -> int:
    inst = _load(args)
    use_fast = args.method == "fast" or (args.method == "auto" and args.cls in FAST_CLASSES and inst.delta <= 4)
    if use_fast:
        res = count_ensembles(inst, args.cls, cap=args.cap)
        label, count = res.label, res.count
    else:
        sysm = build_system(inst, args.cls, args.encoding)
        res = enumerate_all(sysm, cap=args.cap or 10**9)
        label, count = res.count_label, len(res)
    print(label)
    return EXIT_OK if count else EXIT_INFEASIBLE


def cmd_nmr(args) -> int:
    path = Path(args.peaks_file)
    if not path.exists():
        raise UsageError(f"{path}: no such file")
    inst = nmr_to_instance(parse_peaks(path.read_text(), str(path)))
    if args.formula:
        print(formula_hint(args.formula, inst.n), file=sys.stderr)
    text = io.format_instance(inst, comment=f"from peak table {path.name}")
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        sizes = bench.parse_sizes(args.sizes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        print(bench.CSV_HEADER, file=out, flush=True)
        if args.mode == "time":
            bench.run_time(sizes, args.trials, args.seed, out=out)
        else:
            bench.run_count(sizes, args.trials, args.seed, cap=args.cap, out=out)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def cmd_eg_report(args) -> int:
    from .feasibility.diagnostics import eg_divergence_report

    rep = eg_divergence_report(args.ensembles, delta=args.delta, seed=args.seed)
    print(rep.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stubstar", description="Graphs with prescribed degrees and neighbour degree sums")
    sub = p.add_subparsers(dest="command", required=True)

    def instance_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("cls", type=_class, metavar="class",
                        help="multigraph, loopless, simple, forest, tree, caterpillar or connected")
        sp.add_argument("instance", help="instance file: one 'd f' line per vertex")
        sp.add_argument("--peaks", action="store_true", help="read the file as an NMR peak table 'k l [count]'")
        sp.add_argument("--encoding", choices=[e.value for e in Encoding], default="semantic")
        sp.add_argument("--formula", help="CnHm formula; prints a target-class hint")
        sp.add_argument("--lp", metavar="FILE", help="write the linear system in LP format")
        return sp

    sp = instance_cmd("decide", "print FEASIBLE or INFEASIBLE")
    sp.add_argument("-v", "--verbose", action="store_true", help="also print the ensemble found")
    sp.set_defaults(func=cmd_decide)

    sp = instance_cmd("construct", "print a verified realization as an edge list")
    sp.add_argument("--dot", action="store_true", help="write DOT instead of an edge list")
    sp.add_argument("-o", "--output", help="output file (default stdout)")
    sp.set_defaults(func=cmd_construct)

    sp = instance_cmd("count", "count feasible ensembles")
    sp.add_argument("--cap", type=int, help="stop counting at this many")
    sp.add_argument("--method", choices=["auto", "fast", "enumerate"], default="auto")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("nmr", help="convert an NMR peak table into an instance file")
    sp.add_argument("peaks_file")
    sp.add_argument("--formula", help="CnHm formula; prints a target-class hint")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_nmr)

    sp = sub.add_parser("bench", help="random-tree benchmarks, CSV on stdout")
    sp.add_argument("mode", choices=["time", "count"])
    sp.add_argument("--sizes", default=None, help="e.g. 100..1000:100 or 10,20,30")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap", type=int, help="count mode: cap per trial")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("eg-report", help="compare the linear EG row with the classical test")
    sp.add_argument("--ensembles", type=int, default=500)
    sp.add_argument("--delta", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_eg_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.sizes is None:
        args.sizes = "100..1000:100" if args.mode == "time" else "10..80:10"
    try:
        return args.func(args)
    except (UsageError, io.ParseError, PeakError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
