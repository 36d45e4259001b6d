"""Command line interface: ``macroplan <command> ...``.

Exit status is 0 on success, 1 when planning or validation fails, 2 on
usage or input errors and 3 when a resource cap is hit.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time

from .acyclic import acyclic_planner
from .domains import DomainSpec, generate
from .errors import ClassViolation, CyclicGraphError, NoPlan, ParseError, PlanningError, ResourceLimit
from .graphs import CONVENTIONAL, KINDS, Verdict, classify, graph_of_kind, normalize
from .io import BenchRow, BENCH_COLUMNS, emit_dot, parse_plan, parse_problem, serialize_plan, serialize_problem
from .irplanner import macroplanner, relaxed_planner
from .oracle import oracle
from .plans import validate
from .reversible import reversible_planner

OK, FAIL, USAGE, CAP = 0, 1, 2, 3
PLANNERS = ("auto", "ir", "rir", "ar", "aor")


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def choose_planner(report):
    """First class with a Yes verdict, in the order IR, RIR, AOR, AR."""
    if report.ir == Verdict.YES:
        return "ir", None
    if report.rir == Verdict.YES:
        return "rir", None
    for cls in ("aor", "ar"):
        kind = report.kind_for(cls)
        if kind is not None:
            return cls, kind
    return None, None


def run_planner(problem, planner="auto", kind=None, prune=False, all_solutions=False, assume_reversible=False):
    if planner == "auto":
        # structural classes first; reversibility checks can be expensive
        report = classify(problem, reversibility=False)
        planner, auto_kind = choose_planner(report)
        if planner is None:
            report = classify(problem)
            planner, auto_kind = choose_planner(report)
        if planner is None:
            raise ClassViolation(f"no supported class applies ({report.summary()})")
        kind = kind or auto_kind
    if planner == "ir":
        return macroplanner(problem, prune=prune)
    if planner == "rir":
        return relaxed_planner(problem, prune=prune)
    if planner == "ar":
        return reversible_planner(problem, kind=kind)
    return acyclic_planner(problem, kind=kind, all_solutions=all_solutions, assume_reversible=assume_reversible)


def cmd_analyze(args):
    problem = parse_problem(_read(args.file))
    report = classify(problem, budget=args.budget)
    print(report.summary())
    for kind in KINDS:
        if report.acyclic.get(kind):
            print(f"k[{kind}]={report.k[kind]}")
    print(f"max_domain={report.max_domain}")
    if args.dot:
        if args.normalized:
            comps = normalize(problem, args.graph)
            text = "".join(emit_dot(c.graph, not args.full, c.problem.schema.names) for c in comps)
        else:
            text = emit_dot(graph_of_kind(problem, args.graph), not args.full, problem.schema.names)
        _write(args.dot, text)
    return OK


def cmd_plan(args):
    problem = parse_problem(_read(args.file))
    try:
        result = run_planner(problem, args.planner, args.graph, args.prune, args.all_solutions, args.assume_reversible)
    except (NoPlan, ClassViolation, CyclicGraphError) as e:
        print(f"fail: {e}")
        return FAIL
    m = result.metrics
    comments = [f"planner {result.planner}", f"expanded_length {result.length}",
                f"macros_generated {m.macros_generated}", f"macros_used {m.macros_used}"]
    _write(args.output, serialize_plan(result.plan, problem, comments))
    if args.all_solutions and args.output not in (None, "-"):
        for i, sol in enumerate(result.solutions[1:], 1):
            _write(f"{args.output}.{i}", serialize_plan(sol, problem))
    print("\n".join(comments), file=sys.stderr)
    return OK


def cmd_length(args):
    print(parse_plan(_read(args.plan)).length)
    return OK


def cmd_expand(args):
    for name in parse_plan(_read(args.plan)).expand(args.limit):
        print(name)
    return OK


def cmd_validate(args):
    problem = parse_problem(_read(args.file))
    steps, _ = parse_plan(_read(args.plan)).bind(problem)
    v = validate(steps, problem)
    if v:
        print("valid")
        return OK
    where = f" at {v.index}" if v.index is not None else ""
    print(f"invalid{where}: {v.reason}")
    return FAIL


def cmd_gen(args):
    _write(args.output, serialize_problem(generate(DomainSpec.parse(args.spec))))
    return OK


def cmd_oracle(args):
    problem = parse_problem(_read(args.file))
    r = oracle(problem, args.cap)
    if not r.solvable:
        print(f"unsolvable ({r.states} states)")
        return FAIL
    print(r.length)
    for a in r.plan:
        print(a.name)
    return OK


def _range(text):
    lo, sep, hi = text.partition("..")
    if not sep:
        return int(text), int(text)
    return int(lo), int(hi)


def cmd_bench(args):
    rest = list(args.range)
    if not rest:
        raise ParseError("bench needs a range such as 10..60")
    lo, hi = _range(rest[0])
    step = 1
    if len(rest) == 3 and rest[1] == "step":
        step = int(rest[2])
    elif len(rest) != 1:
        raise ParseError("expected <lo>..<hi> [step <k>]")
    fixed = DomainSpec.parse(f"{args.suite}:{args.fixed}" if args.fixed else args.suite).params
    print("\t".join(BENCH_COLUMNS))
    status = OK
    for value in range(lo, hi + 1, step):
        spec = DomainSpec(args.suite, {**fixed, args.param: value})
        problem = generate(spec)
        report = classify(problem, reversibility=False)
        t0 = time.perf_counter()
        try:
            result = run_planner(problem, args.planner)
        except (NoPlan, ClassViolation, CyclicGraphError):
            status = FAIL
            continue
        ms = (time.perf_counter() - t0) * 1000
        m = result.metrics
        row = BenchRow(spec.label(), ms, m.macros_generated, m.macros_used, result.length,
                       result.planner, report.summary().replace(" ", ","))
        print(row.to_tsv(), flush=True)
    return status


def build_parser():
    p = argparse.ArgumentParser(prog="macroplan", description="Macro-based planning for causal-graph classes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="classify a problem")
    a.add_argument("file")
    a.add_argument("--dot", metavar="PATH", help="write the causal graph as DOT ('-' for stdout)")
    a.add_argument("--graph", choices=KINDS, default=CONVENTIONAL)
    a.add_argument("--full", action="store_true", help="draw every edge solid")
    a.add_argument("--normalized", action="store_true", help="draw the normalised components, including v*")
    a.add_argument("--budget", type=int, default=None, help="state budget for reversibility checks")
    a.set_defaults(func=cmd_analyze)

    a = sub.add_parser("plan", help="plan and write a plan file")
    a.add_argument("file")
    a.add_argument("--planner", choices=PLANNERS, default="auto")
    a.add_argument("--graph", choices=KINDS, default=None)
    a.add_argument("--prune", action="store_true")
    a.add_argument("--all-solutions", action="store_true")
    a.add_argument("--assume-reversible", action="store_true")
    a.add_argument("-o", "--output", default=None)
    a.set_defaults(func=cmd_plan)

    a = sub.add_parser("length", help="expanded length of a plan file")
    a.add_argument("plan")
    a.set_defaults(func=cmd_length)

    a = sub.add_parser("expand", help="print the primitive actions of a plan")
    a.add_argument("plan")
    a.add_argument("--limit", type=int, default=10**6)
    a.set_defaults(func=cmd_expand)

    a = sub.add_parser("validate", help="check a plan against a problem")
    a.add_argument("file")
    a.add_argument("plan")
    a.set_defaults(func=cmd_validate)

    a = sub.add_parser("gen", help="generate a problem, e.g. hanoi:n=5")
    a.add_argument("spec")
    a.add_argument("-o", "--output", default=None)
    a.set_defaults(func=cmd_gen)

    a = sub.add_parser("oracle", help="optimal plan by explicit search")
    a.add_argument("file")
    a.add_argument("--cap", type=int, default=None)
    a.set_defaults(func=cmd_oracle)

    a = sub.add_parser("bench", help="TSV benchmark, e.g. bench hanoi 10..60 step 10")
    a.add_argument("suite")
    a.add_argument("range", nargs="*")
    a.add_argument("--param", default="n", help="parameter the range applies to")
    a.add_argument("--fixed", default="", help="other parameters, e.g. R=101")
    a.add_argument("--planner", choices=PLANNERS, default="auto")
    a.set_defaults(func=cmd_bench)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ResourceLimit as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return CAP
    except (ParseError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except PlanningError as e:
        print(f"fail: {e}", file=sys.stderr)
        return FAIL


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
