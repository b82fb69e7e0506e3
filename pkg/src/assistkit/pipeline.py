"""End-to-end analysis pipeline: flow graph -> abstract queries -> SQL
parsing/typing -> sanitization plan -> instrumented AST.

This module is the programmatic face of the tool; the CLI and the eval
harness are thin wrappers around it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .flowgraph import FlowGraph, SourceLocation, build_flow_graph, find_execution_points, lint
from .instrument import (
    CONFLICT_ERROR,
    InsertionPoint,
    SanitizationPlan,
    UNRESOLVABLE_STRING,
    build_plan,
    instrument_program,
    locate_insertion_points,
)
from .minilang.nodes import Program
from .qfs import (
    COVERING,
    DEFAULT_CAP,
    AbstractQuery,
    Literal,
    Placeholder,
    abstract_queries_at,
    find_query_fragments,
)
from .sqlschema import (
    Conflicted,
    ParseOutcome,
    PlaceholderResolution,
    Resolved,
    Schema,
    Unresolvable,
    Valid,
    parse_abstract_query,
    resolve_placeholders,
)


@dataclass
class PointAnalysis:
    node: int
    loc: SourceLocation
    truncated: bool
    queries: list[AbstractQuery]
    outcomes: list[ParseOutcome]
    resolutions: list[PlaceholderResolution]


@dataclass
class Analysis:
    program: Program
    schema: Schema
    graph: FlowGraph
    mode: str
    cap: int
    conflict_policy: str
    unresolvable_policy: str
    points: list[PointAnalysis]
    resolutions: list[PlaceholderResolution]  # merged across execution points
    insertion_points: list[InsertionPoint]
    plan: SanitizationPlan
    warnings: list[str]
    timing_ms: dict[str, float]

    def display_name(self, placeholder: int) -> str:
        for point in self.points:
            for query in point.queries:
                for ph in query.placeholders():
                    if ph.node == placeholder and ph.display:
                        return ph.display
        return f"#{placeholder}"


def analyze_program(program: Program, schema: Schema, *, mode: str = COVERING,
                    cap: int = DEFAULT_CAP, conflict_policy: str = CONFLICT_ERROR,
                    unresolvable_policy: str = UNRESOLVABLE_STRING) -> Analysis:
    """Run every analysis phase. Raises AnalysisError on undeclared variables
    and CrossProductOverflowError in exact mode past the cap; conflicts and
    unresolvable placeholders are reported in the plan, not raised."""
    timing: dict[str, float] = {}

    t0 = time.perf_counter()
    graph = build_flow_graph(program)
    warnings = lint(graph)
    timing["flowgraph"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    points: list[PointAnalysis] = []
    seen_nodes: set[int] = set()
    for ep in graph.exec_points:
        # several executeQuery statements can share one value node; analyze once
        if ep.node in seen_nodes:
            continue
        seen_nodes.add(ep.node)
        fragments = find_query_fragments(graph, ep.node, mode=mode, cap=cap)
        queries = abstract_queries_at(graph, ep.node, mode=mode, cap=cap)
        points.append(PointAnalysis(
            node=ep.node,
            loc=ep.loc,
            truncated=fragments.truncated,
            queries=queries,
            outcomes=[],
            resolutions=[],
        ))
    timing["query_fragments"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    all_outcomes: list[ParseOutcome] = []
    for point in points:
        point.outcomes = [parse_abstract_query(q, schema) for q in point.queries]
        point.resolutions = resolve_placeholders(point.outcomes)
        all_outcomes.extend(point.outcomes)
    merged = resolve_placeholders(all_outcomes)
    timing["sql_typing"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    placeholders = [r.placeholder for r in merged]
    insertion_points = locate_insertion_points(graph, placeholders)
    plan = build_plan(insertion_points, merged,
                      conflict_policy=conflict_policy,
                      unresolvable_policy=unresolvable_policy)
    timing["plan"] = (time.perf_counter() - t0) * 1000.0

    return Analysis(
        program=program,
        schema=schema,
        graph=graph,
        mode=mode,
        cap=cap,
        conflict_policy=conflict_policy,
        unresolvable_policy=unresolvable_policy,
        points=points,
        resolutions=merged,
        insertion_points=insertion_points,
        plan=plan,
        warnings=warnings,
        timing_ms=timing,
    )


def instrument_from_analysis(analysis: Analysis) -> Program:
    t0 = time.perf_counter()
    instrumented = instrument_program(analysis.program, analysis.plan)
    analysis.timing_ms["instrument"] = (time.perf_counter() - t0) * 1000.0
    return instrumented


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------

def _loc_dict(loc: SourceLocation) -> dict:
    return {"file": loc.file, "line": loc.line, "column": loc.column}


def _segment_dict(analysis: Analysis, seg) -> dict:
    if isinstance(seg, Literal):
        return {"literal": seg.text}
    node = analysis.graph.nodes[seg.node]
    return {"placeholder": seg.node, "display": seg.display, "param": node.param}


def _resolution_dict(analysis: Analysis, res: PlaceholderResolution) -> dict:
    node = analysis.graph.nodes[res.placeholder]
    out = {
        "placeholder": res.placeholder,
        "display": analysis.display_name(res.placeholder),
        "param": node.param,
    }
    status = res.status
    if isinstance(status, Resolved):
        out["resolved"] = {"kind": status.kind}
    elif isinstance(status, Conflicted):
        out["resolved"] = {"conflict": list(status.kinds)}
    elif isinstance(status, Unresolvable):
        out["resolved"] = {"unresolvable": status.reason}
    return out


def report_dict(analysis: Analysis, program_id: str) -> dict:
    """JSON-ready report of every intermediate artifact. Serialization with
    sorted keys is byte-deterministic apart from the timing_ms block."""
    exec_points = []
    for point in analysis.points:
        queries = []
        for query, outcome in zip(point.queries, point.outcomes):
            entry: dict = {
                "rendered": query.render(),
                "segments": [_segment_dict(analysis, s) for s in query.segments],
            }
            if isinstance(outcome.status, Valid):
                entry["status"] = "valid"
                entry["bindings"] = [
                    {
                        "placeholder": b.placeholder,
                        "display": analysis.display_name(b.placeholder),
                        "attribute": f"{b.table}.{b.attribute}",
                        "domain": b.domain.kind,
                    }
                    for b in outcome.status.bindings
                ]
            else:
                entry["status"] = "invalid"
                entry["error"] = {
                    "segment": outcome.status.segment_index,
                    "message": outcome.status.message,
                }
            queries.append(entry)
        exec_points.append({
            "node": point.node,
            "location": _loc_dict(point.loc),
            "truncated": point.truncated,
            "queries": queries,
            "resolutions": [_resolution_dict(analysis, r) for r in point.resolutions],
        })

    plan = {
        "ok": analysis.plan.ok,
        "entries": [
            {
                "placeholder": e.point.placeholder,
                "display": analysis.display_name(e.point.placeholder),
                "param": analysis.graph.nodes[e.point.placeholder].param,
                "sanitizer": e.kind,
                "target_node": e.point.target,
                "side": e.point.side,
                "location": _loc_dict(e.point.loc),
            }
            for e in analysis.plan.entries
        ],
        "diagnostics": [
            {
                "placeholder": d.placeholder,
                "param": analysis.graph.nodes[d.placeholder].param,
                "problem": d.problem,
                "detail": d.detail,
                "action": d.action,
            }
            for d in analysis.plan.diagnostics
        ],
    }

    return {
        "program": program_id,
        "mode": analysis.mode,
        "cap": analysis.cap,
        "conflict_policy": analysis.conflict_policy,
        "unresolvable_policy": analysis.unresolvable_policy,
        "warnings": list(analysis.warnings),
        "execution_points": exec_points,
        "resolutions": [_resolution_dict(analysis, r) for r in analysis.resolutions],
        "plan": plan,
        "timing_ms": {k: round(v, 3) for k, v in analysis.timing_ms.items()},
    }
