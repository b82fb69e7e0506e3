"""Random loop-free QScript generator and a path-enumeration oracle.

The generator emits source text (so locations come from the real parser) with
bounded branch and concatenation counts. It keeps a single-use discipline:
each variable is referenced at most once in expression position. Reusing a
branch-merged variable twice in one query would make the fragment-set cross
product pair values from different paths, which path enumeration never does;
single-use programs keep both views equal while still exercising merges,
unions, and nested branches. Condition operands are exempt (conditions do
not feed queries).

The oracle walks every control-flow path carrying symbolic values: tuples of
("lit", text) and ("ph", (line, column) of the getParam site). Comparing it
with exact-mode fragment sets is the analysis ground truth on loop-free
programs.
"""

from __future__ import annotations

import random

from assistkit.minilang.nodes import (
    Assign,
    Concat,
    ConcatAssign,
    ExecuteQuery,
    GetParam,
    If,
    Sanitize,
    StringLiteral,
    VarDecl,
    VarRef,
    While,
)

_WORDS = ["sel", "from", "a", "b", "x = ", "' or '", "q", "zz", " ", "t1"]


class _Gen:
    def __init__(self, rng: random.Random, max_branches: int, max_concats: int):
        self.rng = rng
        self.branches_left = max_branches
        self.concats_left = max_concats
        self.names = 0
        self.params = 0
        self.used: set[str] = set()
        self.lines: list[str] = []

    def fresh_var(self) -> str:
        self.names += 1
        return f"v{self.names}"

    def fresh_param(self) -> str:
        self.params += 1
        return f"p{self.params}"

    def literal(self) -> str:
        word = self.rng.choice(_WORDS)
        return '"' + word.replace("\\", "\\\\").replace('"', '\\"') + '"'

    def term(self, scope: list[str]) -> str:
        roll = self.rng.random()
        unused = [v for v in scope if v not in self.used]
        if roll < 0.45 or (roll < 0.7 and not unused):
            return self.literal()
        if roll < 0.7:
            var = self.rng.choice(unused)
            self.used.add(var)
            return var
        return f'getParam("{self.fresh_param()}")'

    def expr(self, scope: list[str]) -> str:
        parts = [self.term(scope)]
        while self.concats_left > 0 and self.rng.random() < 0.45:
            self.concats_left -= 1
            parts.append(self.term(scope))
        return " + ".join(parts)

    def cond(self, scope: list[str]) -> str:
        def operand() -> str:
            if scope and self.rng.random() < 0.5:
                return self.rng.choice(scope)
            return self.literal()

        op = self.rng.choice(["==", "!=", "<", "<=", ">", ">="])
        return f"{operand()} {op} {operand()}"

    def block(self, scope: list[str], depth: int, indent: str) -> list[str]:
        local = list(scope)
        for _ in range(self.rng.randint(1, 3)):
            roll = self.rng.random()
            writable = [v for v in local if v not in self.used]
            if roll < 0.30 and self.branches_left > 0 and depth < 3:
                self.branches_left -= 1
                self.lines.append(f"{indent}if ({self.cond(local)}) {{")
                then_scope = self.block(local, depth + 1, indent + "    ")
                if self.rng.random() < 0.6:
                    self.lines.append(f"{indent}}} else {{")
                    self.block(local, depth + 1, indent + "    ")
                    self.lines.append(f"{indent}}}")
                else:
                    self.lines.append(f"{indent}}}")
                del then_scope
            elif roll < 0.55 and writable:
                name = self.rng.choice(writable)
                if self.concats_left > 0 and self.rng.random() < 0.6:
                    self.concats_left -= 1
                    self.lines.append(f"{indent}{name} += {self.expr(local)};")
                else:
                    self.lines.append(f"{indent}{name} = {self.expr(local)};")
            else:
                name = self.fresh_var()
                self.lines.append(f"{indent}var {name} = {self.expr(local)};")
                local.append(name)
        return local


def generate_source(rng: random.Random, max_branches: int = 6,
                    max_concats: int = 8) -> str:
    """One random loop-free program with 1-2 execution points."""
    gen = _Gen(rng, rng.randint(0, max_branches), rng.randint(0, max_concats))
    scope = ["q"]
    gen.lines.append(f"var q = {gen.expr(scope)};")
    scope = gen.block(scope, 0, "")
    for _ in range(rng.randint(1, 2)):
        unused = [v for v in scope if v not in gen.used]
        if unused and rng.random() < 0.8:
            target = rng.choice(unused)
            gen.used.add(target)
            gen.lines.append(f"executeQuery({target});")
        else:
            gen.lines.append(f"executeQuery({gen.expr(scope)});")
    return "\n".join(gen.lines) + "\n"


# ---------------------------------------------------------------------------
# Path enumeration oracle
# ---------------------------------------------------------------------------

def _sym_normalize(segments: tuple) -> tuple:
    out: list = []
    for seg in segments:
        if seg[0] == "lit":
            if not seg[1]:
                continue
            if out and out[-1][0] == "lit":
                out[-1] = ("lit", out[-1][1] + seg[1])
                continue
        out.append(seg)
    return tuple(out)


def _sym_eval(expr, env: dict) -> tuple:
    if isinstance(expr, StringLiteral):
        return (("lit", expr.text),)
    if isinstance(expr, GetParam):
        return (("ph", (expr.loc.line, expr.loc.column)),)
    if isinstance(expr, VarRef):
        return env[expr.name]
    if isinstance(expr, Concat):
        return _sym_eval(expr.left, env) + _sym_eval(expr.right, env)
    if isinstance(expr, Sanitize):
        return _sym_eval(expr.value, env)
    raise TypeError(expr)


def enumerate_path_queries(program) -> dict[tuple[int, int], set]:
    """For each executeQuery statement (keyed by location), the set of
    symbolic query values over all control-flow paths, conditions ignored."""
    out: dict[tuple[int, int], set] = {}

    def walk(stmts: tuple, env: dict) -> None:
        for i, stmt in enumerate(stmts):
            if isinstance(stmt, If):
                rest = stmts[i + 1:]
                walk(stmt.then + rest, dict(env))
                walk(stmt.orelse + rest, dict(env))
                return
            if isinstance(stmt, While):
                raise ValueError("oracle handles loop-free programs only")
            if isinstance(stmt, (VarDecl, Assign)):
                env[stmt.name] = _sym_eval(stmt.value, env)
            elif isinstance(stmt, ConcatAssign):
                env[stmt.name] = env[stmt.name] + _sym_eval(stmt.value, env)
            elif isinstance(stmt, ExecuteQuery):
                key = (stmt.loc.line, stmt.loc.column)
                out.setdefault(key, set()).add(
                    _sym_normalize(_sym_eval(stmt.value, env))
                )

    walk(tuple(program), {})
    return out


def enumerate_path_defs(program) -> dict[int, set]:
    """For each VarRef use (keyed by id of the AST node), the definition
    sites -- (line, column) of the defining statement -- reaching it on each
    path. Used to cross-check the reaching-definitions pass."""
    out: dict[int, set] = {}

    def record_expr(expr, env: dict) -> None:
        if isinstance(expr, VarRef):
            out.setdefault(id(expr), set()).add(env[expr.name])
        elif isinstance(expr, Concat):
            record_expr(expr.left, env)
            record_expr(expr.right, env)
        elif isinstance(expr, Sanitize):
            record_expr(expr.value, env)

    def walk(stmts: tuple, env: dict) -> None:
        for i, stmt in enumerate(stmts):
            if isinstance(stmt, If):
                record_expr(stmt.cond.left, env)
                record_expr(stmt.cond.right, env)
                rest = stmts[i + 1:]
                walk(stmt.then + rest, dict(env))
                walk(stmt.orelse + rest, dict(env))
                return
            if isinstance(stmt, (VarDecl, Assign, ConcatAssign)):
                if isinstance(stmt, ConcatAssign):
                    # the implicit left operand reads the variable first
                    out.setdefault(("lhs", id(stmt)), set()).add(env[stmt.name])
                record_expr(stmt.value, env)
                env[stmt.name] = (stmt.loc.line, stmt.loc.column)
            elif isinstance(stmt, ExecuteQuery):
                record_expr(stmt.value, env)

    walk(tuple(program), {})
    return out


def query_key(graph, query) -> tuple:
    """AbstractQuery -> oracle-comparable tuple (placeholders by location)."""
    from assistkit.qfs import Literal, Placeholder

    parts = []
    for seg in query.segments:
        if isinstance(seg, Literal):
            parts.append(("lit", seg.text))
        else:
            node = graph.nodes[seg.node]
            parts.append(("ph", (node.loc.line, node.loc.column)))
    return tuple(parts)
