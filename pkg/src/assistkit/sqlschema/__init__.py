"""Schema loading, SQL-subset parsing of abstract queries, and placeholder
resolution to sanitizer kinds."""

from .queryparse import (
    STR_TOKEN,
    VAL_TOKEN,
    Binding,
    Invalid,
    ParseOutcome,
    Valid,
    concrete_shape,
    parse_abstract_query,
    query_shape,
    render_concrete,
)
from .resolve import (
    Conflicted,
    PlaceholderResolution,
    Resolved,
    Unresolvable,
    resolve_placeholders,
)
from .schema import (
    DOMAIN_NUMERIC,
    DOMAIN_STRING,
    Attribute,
    Domain,
    Schema,
    SchemaError,
    Table,
    load_schema,
    load_schema_file,
)

__all__ = [
    "DOMAIN_NUMERIC",
    "DOMAIN_STRING",
    "STR_TOKEN",
    "VAL_TOKEN",
    "Attribute",
    "Binding",
    "Conflicted",
    "Domain",
    "Invalid",
    "ParseOutcome",
    "PlaceholderResolution",
    "Resolved",
    "Schema",
    "SchemaError",
    "Table",
    "Unresolvable",
    "Valid",
    "concrete_shape",
    "load_schema",
    "load_schema_file",
    "parse_abstract_query",
    "query_shape",
    "render_concrete",
    "resolve_placeholders",
]
