"""Command-line entry point: `lnuma check|run|explore|cost`."""
from __future__ import annotations

import argparse
import json
import sys

from .cost import CostError, CostMatrix, static_cost, trace_cost
from .diagnostics import DiagnosticError
from .effects import locations
from .monitor import explore_verified, verify_run
from .runtime import ExplorationLimit, format_trace, load_location_map, run
from .syntax import parse_behaviour, parse_program, pretty_behaviour
from .syntax.printer import pretty_op
from .syntax.nodes import NodeId, UnmappedLocation
from .typer import check_program

OK, DIAGNOSTICS, FAULT, UNSOUND, USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def _emit_diagnostics(diags, filename):
    for d in diags:
        print(d.format(filename), file=sys.stderr)


def _load_checked(path: str, reports=None):
    """Parse and check; returns (program, diagnostics)."""
    text = _read(path)
    try:
        program = parse_program(text)
    except DiagnosticError as err:
        return None, err.diagnostics
    return program, check_program(program, reports)


def _locmap(arg, program):
    try:
        mapping = load_location_map(arg)
    except ValueError as err:
        raise UsageError(str(err)) from None
    if program is not None:
        wanted = [str(l) for l in program.get("Main").param_locations()]
        missing = [l for l in wanted if l not in mapping]
        extra = [l for l in mapping if l not in wanted]
        if missing:
            raise UsageError(f"location map misses {', '.join(missing)}")
        if extra:
            raise UsageError(f"location map names unknown locations {', '.join(extra)}")
    return mapping


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as err:
        raise UsageError(f"cannot write {path}: {err.strerror}") from None


# -- commands ---------------------------------------------------------------

def cmd_check(args) -> int:
    reports = []
    program, diags = _load_checked(args.file, reports)
    if args.json:
        payload = {"file": args.file, "ok": not diags,
                   "methods": [r.as_record() for r in reports],
                   "diagnostics": [d.format(args.file) for d in diags]}
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        for r in reports:
            if r.ok:
                print(f"{r.cls}.{r.method}: {pretty_behaviour(r.declared)} ✓")
            elif r.filtered is not None:
                print(f"{r.cls}.{r.method}: declared {pretty_behaviour(r.declared)} ✗ "
                      f"(suggested: as {pretty_behaviour(r.filtered)})")
            else:
                print(f"{r.cls}.{r.method}: {pretty_behaviour(r.declared)} ✗")
    _emit_diagnostics(diags, args.file)
    return DIAGNOSTICS if diags else OK


def cmd_run(args) -> int:
    program, diags = _load_checked(args.file)
    if diags:
        _emit_diagnostics(diags, args.file)
        return DIAGNOSTICS
    mapping = _locmap(args.map, program)
    if args.max_steps < 0:
        raise UsageError("--max-steps must be nonnegative")
    if args.verify:
        report = verify_run(program, mapping, "random", args.max_steps, args.seed)
        for v in report.initial:
            print(f"{args.file}: ill-formed initial configuration: {v}", file=sys.stderr)
        if report.initial:
            return DIAGNOSTICS
        text = "".join(line + "\n" for line in report.lines())
        trace = report.trace
        fault, exhausted = report.fault, report.exhausted
    else:
        result = run(program, mapping, "random", args.max_steps, args.seed)
        text = format_trace(result.trace)
        trace = result.trace
        fault, exhausted = result.fault, result.exhausted
    if args.trace:
        _write(args.trace, text)
    else:
        sys.stdout.write(text)
    remote = sum(1 for ev in trace if ev.label is not None)
    status = "fault" if fault else ("max-steps" if exhausted else "quiescent")
    if args.verify and not report.ok:
        status = "unsound"
    print(f"steps={len(trace)} remote={remote} status={status}")
    if args.verify and not report.ok:
        bad = report.first_failure
        print(f"soundness check failed: {bad.format()}", file=sys.stderr)
        return UNSOUND
    if fault:
        print(f"runtime fault: {fault}", file=sys.stderr)
        return FAULT
    return OK


def cmd_explore(args) -> int:
    program, diags = _load_checked(args.file)
    if diags:
        _emit_diagnostics(diags, args.file)
        return DIAGNOSTICS
    mapping = _locmap(args.map, program)
    if args.depth < 0:
        raise UsageError("--depth must be nonnegative")
    try:
        v = explore_verified(program, mapping, args.depth)
    except ExplorationLimit as err:
        print(f"exploration incomplete: {err}", file=sys.stderr)
        return USAGE
    res = v.result
    print(f"interleavings={len(res.traces)} steps={res.steps} states={res.states}")
    for t in sorted(" ".join(_label_text(x) for x in trace) for trace in res.traces):
        print(f"  trace: {t or 'eps'}")
    unsound = v.failures or v.wf_violations
    verdict = "fail" if unsound else ("fault" if res.faults else "pass")
    print(f"verdict={verdict}")
    for rec in v.failures[:5]:
        print(f"soundness check failed: {rec.format()}", file=sys.stderr)
    for w in v.wf_violations[:5]:
        print(f"ill-formed reachable configuration: {w}", file=sys.stderr)
    if unsound:
        return UNSOUND
    if res.faults:
        print(f"runtime fault: {res.faults[0].fault}", file=sys.stderr)
        return FAULT
    return OK


def _label_text(x) -> str:
    if isinstance(x, tuple):
        return "fault"
    return pretty_op(x)


def _default_matrix(mapping, nodes) -> CostMatrix:
    ids = list(mapping.values()) + list(nodes)
    return CostMatrix.uniform(max(ids, default=0) + 1)


def _print_report(title, report, records: bool):
    if records:
        fields = " ".join(f"{k}={v}" for k, v in report.records())
        print(f"{title} {fields}")
    else:
        print(f"{title}")
        for line in report.table().splitlines():
            print(f"  {line}")


def cmd_cost(args) -> int:
    if (args.file is None) == (args.behaviour is None):
        raise UsageError("give either a program file or --behaviour")
    try:
        mapping = load_location_map(args.map) if args.map else {}
    except ValueError as err:
        raise UsageError(str(err)) from None
    if args.behaviour is not None:
        if args.dynamic:
            raise UsageError("--dynamic needs a program file")
        try:
            b = parse_behaviour(args.behaviour)
        except DiagnosticError as err:
            _emit_diagnostics(err.diagnostics, "<behaviour>")
            return DIAGNOSTICS
        nodes = [l.id for l in locations(b) if isinstance(l, NodeId)]
        M = CostMatrix.load(args.matrix) if args.matrix else _default_matrix(mapping, nodes)
        try:
            report = static_cost(b, mapping, M)
        except UnmappedLocation as err:
            raise UsageError(f"location {err.args[0]} is not mapped") from None
        _print_report(pretty_behaviour(b), report, args.records)
        return OK

    program, diags = _load_checked(args.file)
    if diags:
        _emit_diagnostics(diags, args.file)
        return DIAGNOSTICS
    M = CostMatrix.load(args.matrix) if args.matrix else _default_matrix(mapping, [])
    if args.dynamic:
        mapping = _locmap(args.map or "", program)
        result = run(program, mapping, "random", args.max_steps, args.seed)
        _print_report(f"run seed={args.seed}", trace_cost(result.trace, M), args.records)
        if result.fault:
            print(f"runtime fault: {result.fault}", file=sys.stderr)
            return FAULT
        return OK
    for cd in program.classes:
        for md in cd.methods:
            title = f"{cd.name}.{md.name}: {pretty_behaviour(md.behaviour)}"
            try:
                report = static_cost(md.behaviour, mapping, M)
            except UnmappedLocation as err:
                print(f"{title}\n  skipped (location {err.args[0]} is not mapped)")
                continue
            _print_report(title, report, args.records)
    return OK


# -- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lnuma", description="Location-aware effect checker and NUMA machine.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="type-check a program")
    c.add_argument("file")
    c.add_argument("--json", action="store_true", help="machine-readable report")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("run", help="execute under a seeded random scheduler")
    r.add_argument("file")
    r.add_argument("--map", required=True, help="L1=0,L2=1 or a file of such pairs")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-steps", type=int, default=100_000)
    r.add_argument("--trace", metavar="OUT", help="write the trace here instead of stdout")
    r.add_argument("--verify", action="store_true", help="check soundness after every step")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("explore", help="enumerate and verify every interleaving")
    e.add_argument("file")
    e.add_argument("--map", required=True)
    e.add_argument("--depth", type=int, default=10_000)
    e.set_defaults(func=cmd_explore)

    k = sub.add_parser("cost", help="price behaviours or a run against a cost matrix")
    k.add_argument("file", nargs="?")
    k.add_argument("--behaviour", help="price this behaviour term instead of a program")
    k.add_argument("--map")
    k.add_argument("--matrix", help="cost matrix file; defaults to unit costs")
    k.add_argument("--dynamic", action="store_true", help="run the program and price its trace")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--max-steps", type=int, default=100_000)
    k.add_argument("--records", action="store_true", help="one key=value line per report")
    k.set_defaults(func=cmd_cost)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CostError) as err:
        print(f"lnuma {args.command}: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
