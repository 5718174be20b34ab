"""Command-line front end.

Subcommands: gen, solve, check, export-lp, gantt. Paths named "-" read
stdin or write stdout. Exit codes: 0 success, 1 domain trouble (violations
found, instance invalid, no feasible schedule), 2 malformed input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from time import perf_counter

from . import __version__
from .gantt import render_svg
from .generator import generate, params_for_class
from .jsonio import (FormatError, dumps_instance, dumps_report, dumps_schedule,
                     loads_instance, loads_schedule)
from .milp import build_model, emit_lp
from .model import Instance, validate_instance
from .solvers import SolveResult, _Bounder, brute_force, solve_exact, solve_greedy
from .timing import DecodeInfeasible, PlaceState, check_schedule, makespan


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_valid_instance(path: str) -> Instance:
    """Parse and validate, translating failures into exit codes 2 and 1."""
    inst = loads_instance(_read(path))
    report = validate_instance(inst)
    if report:
        for v in report:
            print(f"instance invalid: {v}", file=sys.stderr)
        raise SystemExit(1)
    return inst


def _cmd_gen(args: argparse.Namespace) -> int:
    params = replace(params_for_class(args.instance_class, args.k), seed=args.seed)
    inst = generate(params)
    _write(args.out, dumps_instance(inst))
    if args.out != "-":
        manifest = {
            "class": args.instance_class,
            "k": args.k,
            "seed": args.seed,
            "generator_version": __version__,
            "jobs": params.n,
            "operations": len(inst.operations),
            "machines": inst.num_machines,
        }
        _write(args.out + ".manifest.json", json.dumps(manifest, indent=1))
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = _load_valid_instance(args.instance)
    if args.alg == "exact":
        result = solve_exact(inst, time_limit=args.time_limit, node_limit=args.node_limit)
    elif args.alg == "brute":
        result = brute_force(inst)
    else:
        t0 = perf_counter()
        try:
            sched = solve_greedy(inst)
        except DecodeInfeasible as exc:
            print(f"greedy failed: {exc}", file=sys.stderr)
            return 1
        mk = makespan(sched)
        lb = _Bounder(inst).bound(PlaceState())
        result = SolveResult("feasible", sched, mk, lb, (mk - lb) / (1e-10 + mk), 0,
                             int((perf_counter() - t0) * 1000))
    _write(args.out, json.dumps(result.to_dict(), indent=1))
    return 0 if result.schedule is not None else 1


def _cmd_check(args: argparse.Namespace) -> int:
    inst = _load_valid_instance(args.instance)
    sched = loads_schedule(_read(args.schedule))
    try:
        report = check_schedule(inst, sched)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    _write(args.out, dumps_report(report))
    return 1 if report else 0


def _cmd_export_lp(args: argparse.Namespace) -> int:
    inst = _load_valid_instance(args.instance)
    _write(args.out, emit_lp(build_model(inst)))
    return 0


def _cmd_gantt(args: argparse.Namespace) -> int:
    inst = _load_valid_instance(args.instance)
    sched = loads_schedule(_read(args.schedule))
    unknown_ops = set(sched.ops) - {op.id for op in inst.operations}
    unknown_machines = {so.machine for so in sched.ops.values()} - {mc.id for mc in inst.machines}
    if unknown_ops or unknown_machines:
        raise FormatError(f"schedule references unknown ids: operations {sorted(unknown_ops)}, "
                          f"machines {sorted(unknown_machines)}")
    _write(args.out, render_svg(inst, sched))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flexshop",
                                     description="Job-shop scheduling with calendars, "
                                                 "sequence setups, and operation overlap")
    parser.add_argument("--version", action="version", version=f"flexshop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded instance")
    p.add_argument("instance_class", choices=("small", "medium", "large"))
    p.add_argument("k", type=int, help="1-based instance number within the class")
    p.add_argument("--seed", type=int, required=True, help="64-bit generator seed")
    p.add_argument("--out", default="-", help="instance JSON path, - for stdout")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("instance", help="instance JSON path, - for stdin")
    p.add_argument("--alg", choices=("exact", "greedy", "brute"), default="exact")
    p.add_argument("--time-limit", type=float, default=None, help="seconds, exact search only")
    p.add_argument("--node-limit", type=int, default=None, help="search nodes, exact search only")
    p.add_argument("--out", default="-", help="result JSON path, - for stdout")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("check", help="validate a schedule against an instance")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.add_argument("--out", default="-", help="violation report JSON path, - for stdout")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("export-lp", help="write the exact model in LP format")
    p.add_argument("instance")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_export_lp)

    p = sub.add_parser("gantt", help="render a schedule as SVG")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_gantt)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
