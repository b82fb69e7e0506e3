"""Sanitizers, the QScript interpreter, and query-log handling."""

from .interp import (
    DEFAULT_STEP_BUDGET,
    STEP_BUDGET_ENV,
    LogEntry,
    QueryLog,
    RunError,
    format_query_log,
    parse_query_log,
    read_query_log,
    run_program,
    write_query_log,
)
from .sanitizers import BACKEND, sanitize_numeric, sanitize_string

__all__ = [
    "BACKEND",
    "DEFAULT_STEP_BUDGET",
    "STEP_BUDGET_ENV",
    "LogEntry",
    "QueryLog",
    "RunError",
    "format_query_log",
    "parse_query_log",
    "read_query_log",
    "run_program",
    "sanitize_numeric",
    "sanitize_string",
    "write_query_log",
]
