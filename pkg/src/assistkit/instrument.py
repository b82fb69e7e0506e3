"""Sanitizer placement and AST rewriting.

For each placeholder, follow flow edges forward from its input node until a
concatenation is reached; the sanitizer call wraps the operand expression at
that code location, just before the value is mixed into a query fragment.
Branching forward paths can yield several sites per placeholder. An input
that reaches an execution point without any concatenation (the whole query
is user input) is wrapped at the executeQuery argument itself, since leaving
it bare would defeat the tool's purpose.
"""

from __future__ import annotations

from dataclasses import dataclass

from .flowgraph import CONCAT, FlowGraph
from .minilang.nodes import (
    NUMERIC_SANITIZER,
    STRING_SANITIZER,
    Assign,
    Concat,
    ConcatAssign,
    ExecuteQuery,
    Expr,
    If,
    Sanitize,
    SourceLocation,
    Stmt,
    VarDecl,
    VarRef,
    While,
)
from .sqlschema.resolve import Conflicted, PlaceholderResolution, Resolved, Unresolvable

LEFT = "left"
RIGHT = "right"
ARG = "arg"  # wrap the executeQuery argument (no intervening concatenation)

CONFLICT_NUMERIC = "numeric"
CONFLICT_ERROR = "error"
UNRESOLVABLE_STRING = "string"
UNRESOLVABLE_SKIP = "skip"


class InstrumentError(Exception):
    """AST/plan mismatch: a planned location no longer exists."""


@dataclass(frozen=True)
class InsertionPoint:
    placeholder: int
    target: int  # concat node id, or the exec-point value node for ARG
    loc: SourceLocation
    side: str  # LEFT | RIGHT | ARG


@dataclass(frozen=True)
class PlanEntry:
    point: InsertionPoint
    kind: str  # STRING_SANITIZER | NUMERIC_SANITIZER


@dataclass(frozen=True)
class Diagnostic:
    placeholder: int
    problem: str  # "conflict" | "unresolvable"
    detail: str
    action: str


@dataclass(frozen=True)
class SanitizationPlan:
    entries: tuple[PlanEntry, ...]
    diagnostics: tuple[Diagnostic, ...]
    ok: bool  # False when the conflict policy demands manual review


# ---------------------------------------------------------------------------
# Where to insert
# ---------------------------------------------------------------------------

def locate_insertion_points(graph: FlowGraph, placeholders) -> list[InsertionPoint]:
    """One InsertionPoint per distinct first concatenation reached forward
    from each placeholder node, plus exec-argument points for concat-free
    paths; deterministic order."""
    succ: dict[int, list[tuple[int, str]]] = {nid: [] for nid in graph.nodes}
    for node in graph.nodes.values():
        if node.kind == CONCAT:
            left, right = node.preds
            succ[left].append((node.id, LEFT))
            succ[right].append((node.id, RIGHT))
        else:
            for p in node.preds:
                succ[p].append((node.id, ""))

    exec_locs: dict[int, list[SourceLocation]] = {}
    for ep in graph.exec_points:
        exec_locs.setdefault(ep.node, []).append(ep.loc)

    points: list[InsertionPoint] = []
    for ph in placeholders:
        found: set[tuple[int, str]] = set()
        exec_hits: set[int] = set()
        seen = {ph}
        frontier = [ph]
        while frontier:
            nid = frontier.pop()
            if nid in exec_locs:
                exec_hits.add(nid)
            for succ_id, side in succ[nid]:
                node = graph.nodes[succ_id]
                if node.kind == CONCAT:
                    found.add((succ_id, side))
                    continue  # sanitized before the concat; stop this path
                if succ_id not in seen:
                    seen.add(succ_id)
                    frontier.append(succ_id)
        for concat_id, side in found:
            points.append(
                InsertionPoint(ph, concat_id, graph.nodes[concat_id].loc, side)
            )
        for exec_node in exec_hits:
            for loc in exec_locs[exec_node]:
                points.append(InsertionPoint(ph, exec_node, loc, ARG))
    points.sort(key=lambda p: (p.loc.line, p.loc.column, p.side, p.placeholder))
    return points


# ---------------------------------------------------------------------------
# What to insert
# ---------------------------------------------------------------------------

def build_plan(points, resolutions, conflict_policy: str = CONFLICT_ERROR,
               unresolvable_policy: str = UNRESOLVABLE_STRING) -> SanitizationPlan:
    """Pair insertion points with sanitizer kinds under the given policies.

    Conflicts resolve to the numeric sanitizer (safe for both domains, may
    limit functionality) under policy "numeric"; under "error" they produce
    no entry and mark the plan as failed. Unresolvable placeholders default
    to the string sanitizer as a fail-safe, or are skipped under "skip".
    """
    by_placeholder: dict[int, PlaceholderResolution] = {
        r.placeholder: r for r in resolutions
    }
    entries: list[PlanEntry] = []
    diagnostics: list[Diagnostic] = []
    ok = True
    for point in points:
        resolution = by_placeholder.get(point.placeholder)
        if resolution is None:
            continue
        status = resolution.status
        if isinstance(status, Resolved):
            entries.append(PlanEntry(point, status.kind))
        elif isinstance(status, Conflicted):
            detail = "used as " + " and ".join(status.kinds)
            if conflict_policy == CONFLICT_NUMERIC:
                entries.append(PlanEntry(point, NUMERIC_SANITIZER))
                diagnostics.append(Diagnostic(
                    point.placeholder, "conflict", detail,
                    "sanitized as numeric (safe for both domains)",
                ))
            else:
                diagnostics.append(Diagnostic(
                    point.placeholder, "conflict", detail,
                    "no sanitizer inserted; manual review required",
                ))
                ok = False
        elif isinstance(status, Unresolvable):
            if unresolvable_policy == UNRESOLVABLE_SKIP:
                diagnostics.append(Diagnostic(
                    point.placeholder, "unresolvable", status.reason,
                    "skipped by policy",
                ))
            else:
                entries.append(PlanEntry(point, STRING_SANITIZER))
                diagnostics.append(Diagnostic(
                    point.placeholder, "unresolvable", status.reason,
                    "string sanitizer inserted as fail-safe default",
                ))
    # Deduplicate diagnostics repeated across a placeholder's several sites.
    unique_diags = list(dict.fromkeys(diagnostics))
    return SanitizationPlan(tuple(entries), tuple(unique_diags), ok)


# ---------------------------------------------------------------------------
# AST rewriting
# ---------------------------------------------------------------------------

def _already_wrapped(expr: Expr, kind: str) -> bool:
    while isinstance(expr, Sanitize):
        if expr.kind == kind:
            return True
        expr = expr.value
    return False


class _Rewriter:
    def __init__(self, plan: SanitizationPlan):
        # (line, column) of the flow node's site -> side -> ordered kinds
        self.wraps: dict[tuple[int, int], dict[str, list[str]]] = {}
        for entry in plan.entries:
            key = (entry.point.loc.line, entry.point.loc.column)
            sides = self.wraps.setdefault(key, {})
            kinds = sides.setdefault(entry.point.side, [])
            if entry.kind not in kinds:
                kinds.append(entry.kind)
        self.unmatched = {
            (key, side) for key, sides in self.wraps.items() for side in sides
        }

    def _kinds(self, loc: SourceLocation, side: str) -> list[str]:
        kinds = self.wraps.get((loc.line, loc.column), {}).get(side, [])
        if kinds:
            self.unmatched.discard(((loc.line, loc.column), side))
        return kinds

    def _wrap(self, expr: Expr, kinds: list[str]) -> Expr:
        for kind in kinds:
            if not _already_wrapped(expr, kind):
                expr = Sanitize(kind, expr, loc=expr.loc)
        return expr

    def expr(self, e: Expr) -> Expr:
        if isinstance(e, Concat):
            left = self._wrap(self.expr(e.left), self._kinds(e.loc, LEFT))
            right = self._wrap(self.expr(e.right), self._kinds(e.loc, RIGHT))
            return Concat(left, right, loc=e.loc)
        if isinstance(e, Sanitize):
            return Sanitize(e.kind, self.expr(e.value), loc=e.loc)
        return e

    def block(self, stmts) -> tuple[Stmt, ...]:
        return tuple(self.stmt(s) for s in stmts)

    def stmt(self, s: Stmt) -> Stmt:
        if isinstance(s, VarDecl):
            return VarDecl(s.name, self.expr(s.value), loc=s.loc)
        if isinstance(s, Assign):
            return Assign(s.name, self.expr(s.value), loc=s.loc)
        if isinstance(s, ConcatAssign):
            right = self._wrap(self.expr(s.value), self._kinds(s.loc, RIGHT))
            left_kinds = self._kinds(s.loc, LEFT)
            if left_kinds:
                # `x += e` has no syntax slot for x's current value; desugar to
                # an explicit concatenation so the wrapper has a place to sit.
                left = self._wrap(VarRef(s.name, loc=s.loc), left_kinds)
                return Assign(s.name, Concat(left, right, loc=s.loc), loc=s.loc)
            return ConcatAssign(s.name, right, loc=s.loc)
        if isinstance(s, If):
            return If(s.cond, self.block(s.then), self.block(s.orelse), loc=s.loc)
        if isinstance(s, While):
            return While(s.cond, self.block(s.body), loc=s.loc)
        if isinstance(s, ExecuteQuery):
            value = self._wrap(self.expr(s.value), self._kinds(s.loc, ARG))
            return ExecuteQuery(value, loc=s.loc)
        raise TypeError(f"not a statement node: {s!r}")


def instrument_program(program, plan: SanitizationPlan):
    """Rewrite the AST per the plan. Operands already wrapped with the same
    sanitizer are left alone, so re-instrumenting instrumented code is a
    fixpoint. Raises InstrumentError if any planned location is missing."""
    rewriter = _Rewriter(plan)
    result = rewriter.block(program)
    if rewriter.unmatched:
        missing = ", ".join(
            f"{line}:{col} ({side})" for (line, col), side in sorted(rewriter.unmatched)
        )
        raise InstrumentError(f"stale plan locations not found in AST: {missing}")
    return result
