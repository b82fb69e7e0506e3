"""Command-line driver.

    assistkit analyze    <program.qs> --schema <db.schema> [flags]
    assistkit instrument <program.qs> --schema <db.schema> --out <file> [flags]
    assistkit eval       <program.qs> <tests.suite> --schema <db.schema> [flags]

Exit codes: 0 success; 1 analysis findings requiring attention (a type
conflict under --conflict=error); 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .flowgraph import AnalysisError, to_dot
from .harness import SuiteError, eval_report_dict, evaluate_program, load_suite_file
from .instrument import (
    ARG,
    CONFLICT_ERROR,
    CONFLICT_NUMERIC,
    UNRESOLVABLE_SKIP,
    UNRESOLVABLE_STRING,
)
from .minilang import QScriptSyntaxError, emit_source, parse_file
from .pipeline import Analysis, analyze_program, instrument_from_analysis, report_dict
from .qfs import COVERING, CrossProductOverflowError, DEFAULT_CAP, EXACT
from .runtime import RunError, write_query_log
from .sqlschema import Conflicted, Resolved, SchemaError, Unresolvable, load_schema_file

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("program", help="QScript program (.qs)")
    sub.add_argument("--schema", required=True, help="database schema file")
    sub.add_argument("--mode", choices=[EXACT, COVERING], default=COVERING,
                     help="concatenation handling (default: covering)")
    sub.add_argument("--cap", type=int, default=DEFAULT_CAP,
                     help=f"abstract-query cap per execution point (default: {DEFAULT_CAP})")
    sub.add_argument("--conflict", choices=[CONFLICT_NUMERIC, CONFLICT_ERROR],
                     default=CONFLICT_ERROR,
                     help="policy for placeholders typed both string and numeric "
                          "(default: error)")
    sub.add_argument("--unresolvable", choices=[UNRESOLVABLE_STRING, UNRESOLVABLE_SKIP],
                     default=UNRESOLVABLE_STRING,
                     help="policy for placeholders seen only in invalid queries "
                          "(default: string)")
    sub.add_argument("--allow-sanitizers", action="store_true",
                     help="accept sanitizer calls in the input (reparse instrumented code)")
    sub.add_argument("--dump-flowgraph", action="store_true",
                     help="print the string flow graph in DOT format")
    sub.add_argument("--dump-queries", action="store_true",
                     help="print abstract queries per execution point")
    sub.add_argument("--report", metavar="PATH", help="write a JSON report")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assistkit",
        description="Locate SQL-injection-prone string concatenations in QScript "
                    "programs and rewrite them with sanitizer calls.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    analyze = subs.add_parser("analyze", help="report abstract queries and the plan")
    _add_common(analyze)

    instrument = subs.add_parser("instrument", help="write an instrumented program")
    _add_common(instrument)
    instrument.add_argument("--out", required=True, metavar="PATH",
                            help="path for the instrumented program")

    evaluate = subs.add_parser("eval", help="differential attack/legit evaluation")
    _add_common(evaluate)
    # the suite path rides second; argparse keeps it after the program path
    evaluate.add_argument("suite", help="test suite (ATTACK/LEGIT input vectors)")
    return parser


def _run_analysis(args) -> tuple[Analysis, float]:
    t0 = time.perf_counter()
    program = parse_file(args.program, allow_sanitizers=args.allow_sanitizers)
    parse_ms = (time.perf_counter() - t0) * 1000.0
    schema = load_schema_file(args.schema)
    analysis = analyze_program(
        program, schema, mode=args.mode, cap=args.cap,
        conflict_policy=args.conflict, unresolvable_policy=args.unresolvable,
    )
    analysis.timing_ms = {"parse": round(parse_ms, 3), **analysis.timing_ms}
    return analysis


def _print_analysis(analysis: Analysis, args) -> None:
    if args.dump_flowgraph:
        print(to_dot(analysis.graph), end="")
    for warning in analysis.warnings:
        print(f"warning: {warning}")
    for point in analysis.points:
        valid = sum(1 for o in point.outcomes if o.is_valid)
        print(f"execution point at {point.loc} (node n{point.node}): "
              f"{len(point.queries)} abstract queries, "
              f"{len(point.queries) - valid} invalid"
              + (" [truncated]" if point.truncated else ""))
        if args.dump_queries:
            for query, outcome in zip(point.queries, point.outcomes):
                status = "valid" if outcome.is_valid \
                    else f"invalid: {outcome.status.message}"
                print(f"  {query.render()!r}  [{status}]")
    if analysis.resolutions:
        print("resolutions:")
        for res in analysis.resolutions:
            node = analysis.graph.nodes[res.placeholder]
            name = analysis.display_name(res.placeholder)
            status = res.status
            if isinstance(status, Resolved):
                desc = f"{status.kind} sanitizer"
            elif isinstance(status, Conflicted):
                desc = "CONFLICT: " + " and ".join(status.kinds)
            else:
                desc = f"unresolvable ({status.reason})"
            print(f"  {name} (param {node.param!r}) -> {desc}")
    if analysis.plan.entries:
        print("plan:")
        for entry in analysis.plan.entries:
            where = "executeQuery argument" if entry.point.side == ARG \
                else f"{entry.point.side} operand"
            name = analysis.display_name(entry.point.placeholder)
            print(f"  {entry.kind} sanitizer at {entry.point.loc} ({where}) for {name}")
    for diag in analysis.plan.diagnostics:
        param = analysis.graph.nodes[diag.placeholder].param
        print(f"diagnostic: param {param!r}: {diag.problem}: {diag.detail}; {diag.action}")


def _write_report(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_analyze(args) -> int:
    analysis = _run_analysis(args)
    _print_analysis(analysis, args)
    if args.report:
        _write_report(args.report, report_dict(analysis, args.program))
    return EXIT_OK if analysis.plan.ok else EXIT_FINDINGS


def _cmd_instrument(args) -> int:
    analysis = _run_analysis(args)
    _print_analysis(analysis, args)
    if not analysis.plan.ok:
        print("instrumentation refused: conflicts require manual review "
              "(rerun with --conflict=numeric to coerce)", file=sys.stderr)
        if args.report:
            _write_report(args.report, report_dict(analysis, args.program))
        return EXIT_FINDINGS
    instrumented = instrument_from_analysis(analysis)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(emit_source(instrumented))
    print(f"instrumented program written to {args.out}")
    if args.report:
        _write_report(args.report, report_dict(analysis, args.program))
    return EXIT_OK


def _cmd_eval(args) -> int:
    program = parse_file(args.program, allow_sanitizers=args.allow_sanitizers)
    schema = load_schema_file(args.schema)
    suite = load_suite_file(args.suite)
    result = evaluate_program(
        program, schema, suite, program_id=args.program, mode=args.mode,
        cap=args.cap, conflict_policy=args.conflict,
        unresolvable_policy=args.unresolvable,
    )
    print(f"{result.program_id}: {len(result.results)} inputs "
          f"({result.attacks} attack, {result.legits} legit)")
    for name, count in sorted(result.counts.items()):
        print(f"  {name}: {count}")
    print(f"  successful attacks (false negatives): {result.successful_attacks}")
    print(f"  legit modified, byte diff (false positives): {result.legit_modified_byte}")
    print(f"  legit modified, structural diff: {result.legit_modified_structural}")
    for input_id, message in result.errors:
        print(f"  run error on input {input_id}: {message}", file=sys.stderr)
    if args.report:
        _write_report(args.report, eval_report_dict(result))
        write_query_log(result.original_log, args.report + ".original.log")
        write_query_log(result.instrumented_log, args.report + ".instrumented.log")
    return EXIT_ERROR if result.errors else EXIT_OK


def main(argv=None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "instrument":
            return _cmd_instrument(args)
        return _cmd_eval(args)
    except (QScriptSyntaxError, SchemaError, SuiteError, AnalysisError,
            CrossProductOverflowError, RunError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
