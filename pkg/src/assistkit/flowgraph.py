"""String flow graph construction.

The graph tracks how string values are created, assigned, and concatenated
across the whole program. Node kinds:

  * init_literal    -- a string literal evaluation (carries the text)
  * init_any_string -- an external input read (getParam), value unknown
  * assign          -- a variable definition, or a use-site merge of the
                       definitions reaching it along different control paths
  * concat          -- a two-operand concatenation (ordered left, right)

Construction runs in two passes over the AST: a reaching-definitions pass
(structured fixpoint, so while-loops converge) records which definitions
reach every variable use, then a build pass materializes nodes. A use with
several reaching definitions becomes a fresh merge node whose predecessors
are those definitions' nodes; loop bodies that feed themselves therefore
produce back-edges and the graph may be cyclic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .minilang.nodes import (
    Assign,
    Concat,
    ConcatAssign,
    Cond,
    ExecuteQuery,
    Expr,
    GetParam,
    If,
    Sanitize,
    SourceLocation,
    StringLiteral,
    VarDecl,
    VarRef,
    While,
)

INIT_LITERAL = "init_literal"
INIT_ANY = "init_any_string"
ASSIGN = "assign"
CONCAT = "concat"


class AnalysisError(Exception):
    """Raised for flow-analysis failures such as undeclared variable references."""


@dataclass(frozen=True)
class FlowNode:
    id: int
    kind: str
    loc: SourceLocation = field(compare=False)
    preds: tuple[int, ...] = ()
    text: str | None = None   # init_literal
    param: str | None = None  # init_any_string
    var: str | None = None    # assign

    def describe(self) -> str:
        if self.kind == INIT_LITERAL:
            return f"lit {self.text!r}"
        if self.kind == INIT_ANY:
            return f"any_string({self.param})"
        if self.kind == ASSIGN:
            return f"assign {self.var}"
        return "concat"


@dataclass(frozen=True)
class ExecPoint:
    """One executeQuery statement: the node computing its argument, plus the
    statement's own location (several statements may share one node)."""

    node: int
    loc: SourceLocation


@dataclass(frozen=True)
class FlowGraph:
    nodes: dict[int, FlowNode]
    exec_points: tuple[ExecPoint, ...]

    def node(self, node_id: int) -> FlowNode:
        return self.nodes[node_id]

    def successors(self) -> dict[int, tuple[int, ...]]:
        succ: dict[int, list[int]] = {nid: [] for nid in self.nodes}
        for node in self.nodes.values():
            for p in node.preds:
                succ[p].append(node.id)
        return {nid: tuple(lst) for nid, lst in succ.items()}

    def init_any_nodes(self) -> list[FlowNode]:
        return [n for n in self.nodes.values() if n.kind == INIT_ANY]


# ---------------------------------------------------------------------------
# Pass 1: reaching definitions
# ---------------------------------------------------------------------------
#
# Environments map variable name -> frozenset of def-site indices. Uses are
# recorded keyed by the identity of the VarRef expression (or, for the
# implicit left operand of `x += e`, by the statement identity), so pass 2
# can look them up while walking the same tree.

_Env = dict[str, frozenset]


def _merge_env(a: _Env, b: _Env) -> _Env:
    out = dict(a)
    for name, defs in b.items():
        out[name] = out.get(name, frozenset()) | defs
    return out


class _Reach:
    def __init__(self, defsites: dict[int, int]):
        self._defsites = defsites  # id(stmt) -> def-site index
        self.uses: dict[object, frozenset] = {}

    def _use(self, key, name: str, env: _Env, loc: SourceLocation, record: bool):
        defs = env.get(name)
        if not defs:
            raise AnalysisError(f"{loc}: reference to undeclared variable '{name}'")
        if record:
            self.uses[key] = defs

    def _expr(self, expr: Expr, env: _Env, record: bool) -> None:
        if isinstance(expr, VarRef):
            self._use(id(expr), expr.name, env, expr.loc, record)
        elif isinstance(expr, Concat):
            self._expr(expr.left, env, record)
            self._expr(expr.right, env, record)
        elif isinstance(expr, Sanitize):
            self._expr(expr.value, env, record)
        # literals and getParam read nothing

    def _cond(self, cond: Cond, env: _Env, record: bool) -> None:
        self._expr(cond.left, env, record)
        self._expr(cond.right, env, record)

    def block(self, stmts, env: _Env, record: bool) -> _Env:
        for stmt in stmts:
            if isinstance(stmt, (VarDecl, Assign)):
                self._expr(stmt.value, env, record)
                env = dict(env)
                env[stmt.name] = frozenset([self._defsites[id(stmt)]])
            elif isinstance(stmt, ConcatAssign):
                self._use(("lhs", id(stmt)), stmt.name, env, stmt.loc, record)
                self._expr(stmt.value, env, record)
                env = dict(env)
                env[stmt.name] = frozenset([self._defsites[id(stmt)]])
            elif isinstance(stmt, If):
                self._cond(stmt.cond, env, record)
                env_then = self.block(stmt.then, env, record)
                env_else = self.block(stmt.orelse, env, record)
                env = _merge_env(env_then, env_else)
            elif isinstance(stmt, While):
                env = self._while(stmt, env, record)
            elif isinstance(stmt, ExecuteQuery):
                self._expr(stmt.value, env, record)
            else:
                raise TypeError(f"not a statement node: {stmt!r}")
        return env

    def _while(self, stmt: While, env: _Env, record: bool) -> _Env:
        # Fixpoint over loop-entry environments; the def-site lattice is
        # finite and merging is monotone, so this terminates.
        in_env = env
        while True:
            self._cond(stmt.cond, in_env, record=False)
            out = self.block(stmt.body, in_env, record=False)
            new_in = _merge_env(env, out)
            if new_in == in_env:
                break
            in_env = new_in
        if record:
            self._cond(stmt.cond, in_env, record=True)
            self.block(stmt.body, in_env, record=True)
        return in_env


# ---------------------------------------------------------------------------
# Pass 2: node construction
# ---------------------------------------------------------------------------

class _Builder:
    def __init__(self, uses: dict[object, frozenset], defsites: dict[int, int],
                 assign_node_of: dict[int, int]):
        self._uses = uses
        self._defsites = defsites  # id(stmt) -> def-site index
        self._assign_node_of = assign_node_of  # def-site index -> node id
        self.kinds: dict[int, str] = {}
        self.locs: dict[int, SourceLocation] = {}
        self.preds: dict[int, tuple[int, ...]] = {}
        self.texts: dict[int, str] = {}
        self.params: dict[int, str] = {}
        self.vars: dict[int, str] = {}
        self.exec_points: list[ExecPoint] = []
        self._next = len(assign_node_of)

    def _new(self, kind: str, loc: SourceLocation) -> int:
        nid = self._next
        self._next += 1
        self.kinds[nid] = kind
        self.locs[nid] = loc
        self.preds[nid] = ()
        return nid

    def _resolve_use(self, key, name: str, loc: SourceLocation) -> int:
        node_ids = sorted(self._assign_node_of[ds] for ds in self._uses[key])
        if len(node_ids) == 1:
            return node_ids[0]
        nid = self._new(ASSIGN, loc)
        self.vars[nid] = name
        self.preds[nid] = tuple(node_ids)
        return nid

    def expr(self, expr: Expr) -> int:
        if isinstance(expr, StringLiteral):
            nid = self._new(INIT_LITERAL, expr.loc)
            self.texts[nid] = expr.text
            return nid
        if isinstance(expr, GetParam):
            nid = self._new(INIT_ANY, expr.loc)
            self.params[nid] = expr.param
            return nid
        if isinstance(expr, VarRef):
            return self._resolve_use(id(expr), expr.name, expr.loc)
        if isinstance(expr, Concat):
            left = self.expr(expr.left)
            right = self.expr(expr.right)
            nid = self._new(CONCAT, expr.loc)
            self.preds[nid] = (left, right)
            return nid
        if isinstance(expr, Sanitize):
            # Sanitize wrappers are value-transparent for flow purposes, which
            # keeps re-analysis of instrumented programs stable.
            return self.expr(expr.value)
        raise TypeError(f"not an expression node: {expr!r}")

    def cond(self, cond: Cond) -> None:
        self.expr(cond.left)
        self.expr(cond.right)

    def block(self, stmts) -> None:
        for stmt in stmts:
            if isinstance(stmt, (VarDecl, Assign)):
                rid = self.expr(stmt.value)
                self._fill_assign(stmt, (rid,))
            elif isinstance(stmt, ConcatAssign):
                left = self._resolve_use(("lhs", id(stmt)), stmt.name, stmt.loc)
                right = self.expr(stmt.value)
                cid = self._new(CONCAT, stmt.loc)
                self.preds[cid] = (left, right)
                self._fill_assign(stmt, (cid,))
            elif isinstance(stmt, If):
                self.cond(stmt.cond)
                self.block(stmt.then)
                self.block(stmt.orelse)
            elif isinstance(stmt, While):
                self.cond(stmt.cond)
                self.block(stmt.body)
            elif isinstance(stmt, ExecuteQuery):
                rid = self.expr(stmt.value)
                self.exec_points.append(ExecPoint(rid, stmt.loc))

    def _fill_assign(self, stmt, preds: tuple[int, ...]) -> None:
        nid = self._assign_node_of[self._defsites[id(stmt)]]
        self.preds[nid] = preds


def _collect_def_sites(stmts, out: list) -> None:
    for stmt in stmts:
        if isinstance(stmt, (VarDecl, Assign, ConcatAssign)):
            out.append(stmt)
        elif isinstance(stmt, If):
            _collect_def_sites(stmt.then, out)
            _collect_def_sites(stmt.orelse, out)
        elif isinstance(stmt, While):
            _collect_def_sites(stmt.body, out)


def build_flow_graph(program) -> FlowGraph:
    """Build the string flow graph for a program AST.

    Raises AnalysisError when an expression references a variable with no
    reaching definition on any path.
    """
    def_stmts: list = []
    _collect_def_sites(program, def_stmts)
    defsites = {id(stmt): i for i, stmt in enumerate(def_stmts)}

    reach = _Reach(defsites)
    reach.block(program, {}, record=True)

    # Assign nodes for definition sites are allocated first, in source order,
    # so back-edges from loop bodies can reference them before they are built.
    assign_node_of = {i: i for i in range(len(def_stmts))}
    builder = _Builder(reach.uses, defsites, assign_node_of)
    for i, stmt in enumerate(def_stmts):
        builder.kinds[i] = ASSIGN
        builder.locs[i] = stmt.loc
        builder.vars[i] = stmt.name
        builder.preds[i] = ()
    builder.block(program)

    nodes = {
        nid: FlowNode(
            id=nid,
            kind=builder.kinds[nid],
            loc=builder.locs[nid],
            preds=builder.preds[nid],
            text=builder.texts.get(nid),
            param=builder.params.get(nid),
            var=builder.vars.get(nid),
        )
        for nid in sorted(builder.kinds)
    }
    return FlowGraph(nodes=nodes, exec_points=tuple(builder.exec_points))


def find_execution_points(graph: FlowGraph) -> list[int]:
    """Node ids whose values reach an executeQuery argument, one entry per
    statement, ordered by source location."""
    points = sorted(graph.exec_points, key=lambda ep: (ep.loc.line, ep.loc.column))
    return [ep.node for ep in points]


def lint(graph: FlowGraph) -> list[str]:
    """Non-fatal findings: currently, external inputs whose value flows nowhere."""
    succ = graph.successors()
    exec_nodes = {ep.node for ep in graph.exec_points}
    findings = []
    for node in graph.init_any_nodes():
        if not succ[node.id] and node.id not in exec_nodes:
            findings.append(
                f"{node.loc}: input parameter '{node.param}' is read but its value is never used"
            )
    return findings


def to_dot(graph: FlowGraph) -> str:
    """Render the graph in DOT format for visual inspection."""
    lines = ["digraph flowgraph {"]
    exec_nodes = {ep.node for ep in graph.exec_points}
    for node in graph.nodes.values():
        label = f"n{node.id}: {node.describe()}\\n{node.loc.line}:{node.loc.column}"
        shape = "doubleoctagon" if node.id in exec_nodes else "box"
        lines.append(f'  n{node.id} [label="{label}", shape={shape}];')
    for node in graph.nodes.values():
        if node.kind == CONCAT:
            left, right = node.preds
            lines.append(f'  n{left} -> n{node.id} [label="l"];')
            lines.append(f'  n{right} -> n{node.id} [label="r"];')
        else:
            for p in node.preds:
                lines.append(f"  n{p} -> n{node.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"
