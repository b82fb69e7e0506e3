"""QScript interpreter with a mock database.

Strings are the only value type; conditions compare lexicographically. The
mock database does not execute SQL -- each executeQuery appends the evaluated
string to an append-only log, which is all the differential harness needs.
A step budget (one step per executed statement) bounds while-loops.

Log files are one record per line, tab-separated program-id / input-id /
query, with backslash, tab, and line breaks escaped in the query field. The
format is bit-exact because the harness diffs these files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping

from ..minilang.nodes import (
    Assign,
    Concat,
    ConcatAssign,
    Cond,
    ExecuteQuery,
    Expr,
    GetParam,
    If,
    NUMERIC_SANITIZER,
    Sanitize,
    StringLiteral,
    VarDecl,
    VarRef,
    While,
)
from .sanitizers import sanitize_numeric, sanitize_string

DEFAULT_STEP_BUDGET = 10_000
STEP_BUDGET_ENV = "ASSISTKIT_STEP_BUDGET"


class RunError(Exception):
    """Interpreter failure: undeclared variable or exhausted step budget."""


@dataclass(frozen=True)
class LogEntry:
    program_id: str
    input_id: str
    query: str


@dataclass
class QueryLog:
    entries: list[LogEntry] = field(default_factory=list)

    def append(self, program_id: str, input_id: str, query: str) -> None:
        self.entries.append(LogEntry(program_id, input_id, query))

    def queries(self) -> list[str]:
        return [entry.query for entry in self.entries]


def _step_budget(override: int | None) -> int:
    if override is not None:
        return override
    env = os.environ.get(STEP_BUDGET_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise RunError(f"{STEP_BUDGET_ENV} must be an integer, got {env!r}")
    return DEFAULT_STEP_BUDGET


class _Interp:
    def __init__(self, inputs: Mapping[str, str], budget: int):
        self._inputs = inputs
        self._budget = budget
        self._steps = 0
        self.env: dict[str, str] = {}
        self.queries: list[str] = []

    def _tick(self, stmt) -> None:
        self._steps += 1
        if self._steps > self._budget:
            raise RunError(
                f"{stmt.loc}: step budget of {self._budget} exceeded "
                "(possible non-terminating loop)"
            )

    def expr(self, e: Expr) -> str:
        if isinstance(e, StringLiteral):
            return e.text
        if isinstance(e, VarRef):
            try:
                return self.env[e.name]
            except KeyError:
                raise RunError(f"{e.loc}: use of undeclared variable '{e.name}'")
        if isinstance(e, GetParam):
            # absent parameters read as the empty string, as web frameworks do
            return self._inputs.get(e.param, "")
        if isinstance(e, Concat):
            return self.expr(e.left) + self.expr(e.right)
        if isinstance(e, Sanitize):
            value = self.expr(e.value)
            if e.kind == NUMERIC_SANITIZER:
                return sanitize_numeric(value)
            return sanitize_string(value)
        raise TypeError(f"not an expression node: {e!r}")

    def cond(self, c: Cond) -> bool:
        left = self.expr(c.left)
        right = self.expr(c.right)
        if c.op == "==":
            return left == right
        if c.op == "!=":
            return left != right
        if c.op == "<":
            return left < right
        if c.op == "<=":
            return left <= right
        if c.op == ">":
            return left > right
        return left >= right

    def block(self, stmts) -> None:
        for stmt in stmts:
            self._tick(stmt)
            if isinstance(stmt, VarDecl):
                self.env[stmt.name] = self.expr(stmt.value)
            elif isinstance(stmt, Assign):
                if stmt.name not in self.env:
                    raise RunError(
                        f"{stmt.loc}: assignment to undeclared variable '{stmt.name}'"
                    )
                self.env[stmt.name] = self.expr(stmt.value)
            elif isinstance(stmt, ConcatAssign):
                if stmt.name not in self.env:
                    raise RunError(
                        f"{stmt.loc}: assignment to undeclared variable '{stmt.name}'"
                    )
                self.env[stmt.name] = self.env[stmt.name] + self.expr(stmt.value)
            elif isinstance(stmt, If):
                if self.cond(stmt.cond):
                    self.block(stmt.then)
                else:
                    self.block(stmt.orelse)
            elif isinstance(stmt, While):
                while self.cond(stmt.cond):
                    self.block(stmt.body)
                    self._tick(stmt)
            elif isinstance(stmt, ExecuteQuery):
                self.queries.append(self.expr(stmt.value))
            else:
                raise TypeError(f"not a statement node: {stmt!r}")


def run_program(program, inputs: Mapping[str, str], *, program_id: str = "<program>",
                input_id: str = "", step_budget: int | None = None) -> QueryLog:
    """Interpret a program (instrumented or not) and return its query log.

    Raises RunError on undeclared variable use or when the step budget
    (default 10000, overridable via ASSISTKIT_STEP_BUDGET) is exceeded.
    """
    interp = _Interp(inputs, _step_budget(step_budget))
    interp.block(program)
    log = QueryLog()
    for query in interp.queries:
        log.append(program_id, input_id, query)
    return log


# ---------------------------------------------------------------------------
# Log file format
# ---------------------------------------------------------------------------

def _escape_field(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _unescape_field(text: str) -> str:
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\" and i + 1 < n:
            nxt = text[i + 1]
            mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def format_query_log(log: QueryLog) -> str:
    lines = [
        "\t".join((
            _escape_field(entry.program_id),
            _escape_field(entry.input_id),
            _escape_field(entry.query),
        ))
        for entry in log.entries
    ]
    return "".join(line + "\n" for line in lines)


def write_query_log(log: QueryLog, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_query_log(log))


def parse_query_log(text: str) -> QueryLog:
    log = QueryLog()
    for lineno, line in enumerate(text.splitlines(), 1):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"log line {lineno}: expected 3 tab-separated fields")
        log.append(*(_unescape_field(f) for f in fields))
    return log


def read_query_log(path) -> QueryLog:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_query_log(fh.read())
