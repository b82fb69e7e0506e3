"""assistkit: static SQL-injection sanitization for QScript programs.

Pipeline: parse (minilang) -> string flow graph (flowgraph) -> abstract
queries (qfs) -> SQL parsing and sanitizer typing (sqlschema) -> placement
and rewriting (instrument) -> sanitizers and interpreter (runtime), with a
differential evaluation harness (harness) and CLI (cli) on top.
"""

from .flowgraph import AnalysisError, FlowGraph, build_flow_graph, find_execution_points
from .harness import EvalResult, TestInput, evaluate_program, parse_suite
from .instrument import (
    InsertionPoint,
    InstrumentError,
    SanitizationPlan,
    build_plan,
    instrument_program,
    locate_insertion_points,
)
from .minilang import QScriptSyntaxError, emit_source, parse_file, parse_program
from .pipeline import Analysis, analyze_program, instrument_from_analysis, report_dict
from .qfs import (
    AbstractQuery,
    CrossProductOverflowError,
    QueryFragmentSet,
    abstract_queries_at,
    find_query_fragments,
)
from .runtime import QueryLog, RunError, run_program, sanitize_numeric, sanitize_string
from .sqlschema import (
    ParseOutcome,
    PlaceholderResolution,
    Schema,
    SchemaError,
    load_schema,
    load_schema_file,
    parse_abstract_query,
    resolve_placeholders,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractQuery",
    "Analysis",
    "AnalysisError",
    "CrossProductOverflowError",
    "EvalResult",
    "FlowGraph",
    "InsertionPoint",
    "InstrumentError",
    "ParseOutcome",
    "PlaceholderResolution",
    "QScriptSyntaxError",
    "QueryFragmentSet",
    "QueryLog",
    "RunError",
    "SanitizationPlan",
    "Schema",
    "SchemaError",
    "TestInput",
    "abstract_queries_at",
    "analyze_program",
    "build_flow_graph",
    "build_plan",
    "emit_source",
    "evaluate_program",
    "find_execution_points",
    "find_query_fragments",
    "instrument_from_analysis",
    "instrument_program",
    "load_schema",
    "load_schema_file",
    "locate_insertion_points",
    "parse_abstract_query",
    "parse_file",
    "parse_program",
    "parse_suite",
    "report_dict",
    "resolve_placeholders",
    "run_program",
    "sanitize_numeric",
    "sanitize_string",
    "__version__",
]
