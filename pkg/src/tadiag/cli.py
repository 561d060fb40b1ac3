"""Command-line interface: ``tadiag reach | guards | simcheck | transform | bench``."""

from __future__ import annotations

import argparse
import json
import sys

from .bench.generators import desk_suite
from .bench.harness import ALGORITHMS, default_timeout, format_table as format_cells, run_experiment, write_csv
from .dbm import from_constraints
from .diagfree import eliminate_all
from .guards import GuardSet, compute_state_guards, format_table
from .model import ModelError
from .parser import ParseError, strip_comment, parse_constraints, parse_model, pretty_print
from .reach import Limits, Verdict
from .simulation import SimStats, zone_sim_lug

EXIT_UNREACHABLE = 0
EXIT_REACHABLE = 1
EXIT_ERROR = 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _cmd_reach(args) -> int:
    a = parse_model(_read(args.model))
    table = compute_state_guards(a)
    if args.guards_only:
        sys.stdout.write(format_table(a, table))
        return EXIT_UNREACHABLE if table.finite else EXIT_ERROR
    if not table.finite and args.algorithm != "diagfree-lu":
        sys.stdout.write(format_table(a, table))
        print("error: guard sets are not finite; no search is attempted", file=sys.stderr)
        return EXIT_ERROR
    limits = Limits(max_nodes=args.max_nodes, timeout_s=args.timeout)
    engine = ALGORITHMS[args.algorithm]
    res = engine(a, order=args.order, limits=limits)
    if args.stats == "json":
        print(json.dumps({"verdict": res.verdict.value, **res.stats.as_dict()}, sort_keys=False))
    else:
        print(f"verdict: {res.verdict.value}")
        for k, v in res.stats.as_dict().items():
            print(f"{k}: {v}")
        if res.reason:
            print(f"reason: {res.reason}")
        if res.witness is not None:
            labels = [a.transitions[t].label or f"t{t}" for t in res.witness]
            print("witness: " + " ".join(labels))
    if res.verdict is Verdict.REACHABLE:
        return EXIT_REACHABLE
    if res.verdict is Verdict.UNREACHABLE:
        return EXIT_UNREACHABLE
    return EXIT_ERROR


def _cmd_guards(args) -> int:
    a = parse_model(_read(args.model))
    table = compute_state_guards(a)
    sys.stdout.write(format_table(a, table))
    return 0 if table.finite else EXIT_ERROR


def _constraints_from_file(text: str, clocks: list[str]):
    out = []
    empty = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = strip_comment(line)
        if not line:
            continue
        if line == "false":
            empty = True
            continue
        cons, atoms = parse_constraints(line, clocks, lineno)
        if atoms:
            raise ParseError(lineno, "integer atoms are not allowed here")
        out.extend(cons)
    return out, empty


def _cmd_simcheck(args) -> int:
    clocks = [c.strip() for c in args.clocks.split(",") if c.strip()]
    n = len(clocks)
    zones = []
    for path in (args.zone, args.other):
        cons, empty = _constraints_from_file(_read(path), clocks)
        zones.append(None if empty else from_constraints(n, cons))
    gcons, _ = _constraints_from_file(_read(args.guards), clocks)
    stats = SimStats()
    ok = zone_sim_lug(zones[0], zones[1], GuardSet(gcons, n), stats)
    print("SIMULATED" if ok else "NOT-SIMULATED")
    print(f"calls: {stats.calls}")
    return 0 if ok else 1


def _cmd_transform(args) -> int:
    a = parse_model(_read(args.model))
    sys.stdout.write(pretty_print(eliminate_all(a, prune=args.prune)))
    return 0


def _cmd_bench(args) -> int:
    if args.suite != "desk":
        print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_ERROR
    algorithms = args.algorithms.split(",") if args.algorithms else list(ALGORITHMS)
    for alg in algorithms:
        if alg not in ALGORITHMS:
            print(f"error: unknown algorithm {alg!r}", file=sys.stderr)
            return EXIT_ERROR
    timeout = args.timeout if args.timeout is not None else default_timeout()
    cells = run_experiment(desk_suite(args.big), algorithms, timeout, args.order)
    sys.stdout.write(format_cells(cells))
    if args.out:
        write_csv(cells, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tadiag", description="Reachability for timed automata with diagonal guards.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reach", help="check whether an accepting state is reachable")
    r.add_argument("model")
    r.add_argument("--algorithm", choices=sorted(ALGORITHMS), default="static-g")
    r.add_argument("--order", choices=["bfs", "dfs"], default="bfs")
    r.add_argument("--stats", choices=["text", "json"], default="text")
    r.add_argument("--guards-only", action="store_true", help="print the state guard table and stop")
    r.add_argument("--max-nodes", type=int, default=None)
    r.add_argument("--timeout", type=float, default=None, help="seconds")
    r.set_defaults(func=_cmd_reach)

    g = sub.add_parser("guards", help="print per-state guard sets and LU bounds")
    g.add_argument("model")
    g.set_defaults(func=_cmd_guards)

    s = sub.add_parser("simcheck", help="decide Z ⊑_G Z' for two zones and a guard set")
    s.add_argument("--clocks", required=True, help="comma-separated clock names")
    s.add_argument("zone")
    s.add_argument("other")
    s.add_argument("guards")
    s.set_defaults(func=_cmd_simcheck)

    t = sub.add_parser("transform", help="rewrite a model without diagonal guards")
    t.add_argument("--diagfree", action="store_true", required=True)
    t.add_argument("--prune", action="store_true", help="drop bit combinations unreachable in the state graph")
    t.add_argument("model")
    t.set_defaults(func=_cmd_transform)

    b = sub.add_parser("bench", help="benchmark suites")
    bsub = b.add_subparsers(dest="bench_command", required=True)
    br = bsub.add_parser("run")
    br.add_argument("--suite", default="desk")
    br.add_argument("--big", action="store_true", help="include the larger instances")
    br.add_argument("--out", default=None, help="CSV output path")
    br.add_argument("--algorithms", default=None, help="comma-separated subset")
    br.add_argument("--order", choices=["bfs", "dfs"], default="bfs")
    br.add_argument("--timeout", type=float, default=None, help="per-cell seconds (default from TADIAG_TIMEOUT or 60)")
    br.set_defaults(func=_cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
