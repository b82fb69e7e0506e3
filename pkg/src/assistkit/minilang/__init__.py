"""QScript: parser, AST, and source emitter."""

from .emitter import emit_expr, emit_source
from .nodes import (
    COND_OPS,
    NUMERIC_SANITIZER,
    SANITIZER_KINDS,
    STRING_SANITIZER,
    UNKNOWN_LOC,
    Assign,
    Concat,
    ConcatAssign,
    Cond,
    ExecuteQuery,
    Expr,
    GetParam,
    If,
    Program,
    Sanitize,
    SourceLocation,
    Stmt,
    StringLiteral,
    VarDecl,
    VarRef,
    While,
    iter_expressions,
    iter_nodes,
    iter_statements,
    node_count,
)
from .parser import KEYWORDS, QScriptSyntaxError, parse_file, parse_program

__all__ = [
    "COND_OPS",
    "KEYWORDS",
    "NUMERIC_SANITIZER",
    "SANITIZER_KINDS",
    "STRING_SANITIZER",
    "UNKNOWN_LOC",
    "Assign",
    "Concat",
    "ConcatAssign",
    "Cond",
    "ExecuteQuery",
    "Expr",
    "GetParam",
    "If",
    "Program",
    "QScriptSyntaxError",
    "Sanitize",
    "SourceLocation",
    "Stmt",
    "StringLiteral",
    "VarDecl",
    "VarRef",
    "While",
    "emit_expr",
    "emit_source",
    "iter_expressions",
    "iter_nodes",
    "iter_statements",
    "node_count",
    "parse_file",
    "parse_program",
]
