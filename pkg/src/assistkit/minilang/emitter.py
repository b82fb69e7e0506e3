"""Source emitter for QScript ASTs.

emit_source(parse_program(text)) reparses to a structurally identical AST
(locations aside); that round-trip is what the instrumenter relies on when
it writes rewritten programs back to disk.
"""

from __future__ import annotations

from .nodes import (
    STRING_SANITIZER,
    Assign,
    Concat,
    ConcatAssign,
    Cond,
    ExecuteQuery,
    Expr,
    GetParam,
    If,
    Sanitize,
    StringLiteral,
    VarDecl,
    VarRef,
    While,
)

_INDENT = "    "


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def emit_expr(expr: Expr) -> str:
    if isinstance(expr, StringLiteral):
        return f'"{_escape(expr.text)}"'
    if isinstance(expr, VarRef):
        return expr.name
    if isinstance(expr, GetParam):
        return f'getParam("{_escape(expr.param)}")'
    if isinstance(expr, Concat):
        # Concat chains are emitted flat; the parser rebuilds them
        # left-associated, which is the only shape it ever produces.
        return f"{emit_expr(expr.left)} + {emit_expr(expr.right)}"
    if isinstance(expr, Sanitize):
        fn = "sanitize_string" if expr.kind == STRING_SANITIZER else "sanitize_numeric"
        return f"{fn}({emit_expr(expr.value)})"
    raise TypeError(f"not an expression node: {expr!r}")


def _emit_cond(cond: Cond) -> str:
    return f"{emit_expr(cond.left)} {cond.op} {emit_expr(cond.right)}"


def _emit_block(stmts, depth: int, out: list[str]) -> None:
    pad = _INDENT * depth
    for stmt in stmts:
        if isinstance(stmt, VarDecl):
            out.append(f"{pad}var {stmt.name} = {emit_expr(stmt.value)};")
        elif isinstance(stmt, Assign):
            out.append(f"{pad}{stmt.name} = {emit_expr(stmt.value)};")
        elif isinstance(stmt, ConcatAssign):
            out.append(f"{pad}{stmt.name} += {emit_expr(stmt.value)};")
        elif isinstance(stmt, If):
            out.append(f"{pad}if ({_emit_cond(stmt.cond)}) {{")
            _emit_block(stmt.then, depth + 1, out)
            if stmt.orelse:
                out.append(f"{pad}}} else {{")
                _emit_block(stmt.orelse, depth + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(stmt, While):
            out.append(f"{pad}while ({_emit_cond(stmt.cond)}) {{")
            _emit_block(stmt.body, depth + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(stmt, ExecuteQuery):
            out.append(f"{pad}executeQuery({emit_expr(stmt.value)});")
        else:
            raise TypeError(f"not a statement node: {stmt!r}")


def emit_source(program) -> str:
    """Render a program AST back to QScript source text."""
    if not program:
        return ""
    lines: list[str] = []
    _emit_block(program, 0, lines)
    return "\n".join(lines) + "\n"
