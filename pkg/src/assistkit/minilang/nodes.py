"""QScript abstract syntax tree.

Every node is a frozen dataclass carrying exactly one SourceLocation.
Locations are excluded from equality so structural comparisons (round-trip
tests, instrumentation fixpoints) ignore formatting differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceLocation:
    """1-based position of a node in its source file."""

    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


# A placeholder location for synthesized nodes (sanitizer wrappers inherit
# the location of the expression they wrap, so this rarely leaks into output).
UNKNOWN_LOC = SourceLocation("<synthesized>", 1, 1)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class StringLiteral(Expr):
    text: str
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class VarRef(Expr):
    name: str
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class GetParam(Expr):
    """Read of an external input parameter: the sole source of untrusted data."""

    param: str
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class Concat(Expr):
    left: Expr
    right: Expr
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


# Sanitizer kinds as used by Sanitize nodes and the planner.
STRING_SANITIZER = "string"
NUMERIC_SANITIZER = "numeric"
SANITIZER_KINDS = (STRING_SANITIZER, NUMERIC_SANITIZER)


@dataclass(frozen=True)
class Sanitize(Expr):
    """Sanitizer call wrapper. Never present in user-authored input programs;
    only the instrumenter produces it (the parser rejects the call syntax
    unless explicitly told to accept instrumented output)."""

    kind: str  # STRING_SANITIZER | NUMERIC_SANITIZER
    value: Expr
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


# ---------------------------------------------------------------------------
# Conditions and statements
# ---------------------------------------------------------------------------

COND_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Cond:
    """Comparison between two string expressions (lexicographic semantics)."""

    left: Expr
    op: str
    right: Expr
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class Stmt:
    pass


@dataclass(frozen=True)
class VarDecl(Stmt):
    name: str
    value: Expr
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class Assign(Stmt):
    name: str
    value: Expr
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class ConcatAssign(Stmt):
    """The `name += expr;` form: concatenate onto a string variable."""

    name: str
    value: Expr
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class If(Stmt):
    cond: Cond
    then: tuple[Stmt, ...]
    orelse: tuple[Stmt, ...]
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class While(Stmt):
    cond: Cond
    body: tuple[Stmt, ...]
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


@dataclass(frozen=True)
class ExecuteQuery(Stmt):
    """Query execution point: sends the evaluated string to the database."""

    value: Expr
    loc: SourceLocation = field(compare=False, default=UNKNOWN_LOC)


Program = tuple[Stmt, ...]


# ---------------------------------------------------------------------------
# Tree walking helpers
# ---------------------------------------------------------------------------

def iter_statements(stmts):
    """Yield every statement in the tree, pre-order."""
    for stmt in stmts:
        yield stmt
        if isinstance(stmt, If):
            yield from iter_statements(stmt.then)
            yield from iter_statements(stmt.orelse)
        elif isinstance(stmt, While):
            yield from iter_statements(stmt.body)


def iter_expressions(stmts):
    """Yield every expression in the tree, pre-order, conditions included."""
    for stmt in iter_statements(stmts):
        if isinstance(stmt, (VarDecl, Assign, ConcatAssign, ExecuteQuery)):
            yield from _iter_expr(stmt.value)
        elif isinstance(stmt, (If, While)):
            yield from _iter_expr(stmt.cond.left)
            yield from _iter_expr(stmt.cond.right)


def _iter_expr(expr):
    yield expr
    if isinstance(expr, Concat):
        yield from _iter_expr(expr.left)
        yield from _iter_expr(expr.right)
    elif isinstance(expr, Sanitize):
        yield from _iter_expr(expr.value)


def iter_nodes(stmts):
    """Yield every AST node (statements, expressions, conditions)."""
    for stmt in iter_statements(stmts):
        yield stmt
        if isinstance(stmt, (VarDecl, Assign, ConcatAssign, ExecuteQuery)):
            yield from _iter_expr(stmt.value)
        elif isinstance(stmt, (If, While)):
            yield stmt.cond
            yield from _iter_expr(stmt.cond.left)
            yield from _iter_expr(stmt.cond.right)


def node_count(stmts) -> int:
    return sum(1 for _ in iter_nodes(stmts))
