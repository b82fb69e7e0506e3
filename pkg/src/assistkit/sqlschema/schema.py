"""Database schema: tables, attributes, and their domains.

Schema files are line-oriented UTF-8 (`#` starts a comment line):

    TABLE BOOKS (author STRING, price NUMERIC);
    TABLE T (a STRING(10), b NUMERIC);

Table and attribute names are matched case-insensitively everywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

DOMAIN_STRING = "string"
DOMAIN_NUMERIC = "numeric"


class SchemaError(Exception):
    pass


@dataclass(frozen=True)
class Domain:
    kind: str  # DOMAIN_STRING | DOMAIN_NUMERIC
    max_len: int | None = None


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: Domain


@dataclass(frozen=True)
class Table:
    name: str
    attributes: tuple[Attribute, ...]

    def attribute(self, name: str) -> Attribute | None:
        lowered = name.lower()
        for attr in self.attributes:
            if attr.name.lower() == lowered:
                return attr
        return None


@dataclass(frozen=True)
class Schema:
    tables: tuple[Table, ...]

    def table(self, name: str) -> Table | None:
        lowered = name.lower()
        for table in self.tables:
            if table.name.lower() == lowered:
                return table
        return None


_TABLE_RE = re.compile(r"\s*TABLE\s+([A-Za-z_]\w*)\s*\((.*)\)\s*", re.IGNORECASE | re.DOTALL)
_ATTR_RE = re.compile(r"\s*([A-Za-z_]\w*)\s+([A-Za-z_]\w*)\s*(?:\(\s*(\d+)\s*\))?\s*")


def load_schema(text: str) -> Schema:
    """Parse schema text; raises SchemaError on malformed or empty input."""
    body = "\n".join(
        line for line in text.splitlines() if not line.lstrip().startswith("#")
    )
    statements = [part.strip() for part in body.split(";")]
    statements = [part for part in statements if part]
    if not statements:
        raise SchemaError("empty schema: at least one TABLE is required")

    tables: list[Table] = []
    seen_tables: set[str] = set()
    for stmt in statements:
        m = _TABLE_RE.fullmatch(stmt)
        if not m:
            raise SchemaError(f"malformed schema statement: {stmt!r}")
        table_name, attr_body = m.group(1), m.group(2)
        if table_name.lower() in seen_tables:
            raise SchemaError(f"duplicate table {table_name!r}")
        seen_tables.add(table_name.lower())

        attributes: list[Attribute] = []
        seen_attrs: set[str] = set()
        for attr_text in attr_body.split(","):
            am = _ATTR_RE.fullmatch(attr_text)
            if not am:
                hint = attr_text.strip() or "<empty>"
                raise SchemaError(
                    f"table {table_name!r}: bad attribute declaration {hint!r} "
                    "(expected '<name> STRING[(n)]' or '<name> NUMERIC')"
                )
            attr_name = am.group(1)
            if attr_name.lower() in seen_attrs:
                raise SchemaError(
                    f"table {table_name!r}: duplicate attribute {attr_name!r}"
                )
            seen_attrs.add(attr_name.lower())
            keyword = am.group(2).upper()
            if keyword == "STRING":
                max_len = int(am.group(3)) if am.group(3) else None
                domain = Domain(DOMAIN_STRING, max_len)
            elif keyword == "NUMERIC":
                if am.group(3):
                    raise SchemaError(
                        f"table {table_name!r}: NUMERIC takes no length parameter"
                    )
                domain = Domain(DOMAIN_NUMERIC)
            else:
                raise SchemaError(
                    f"table {table_name!r}: unknown domain keyword {am.group(2)!r} "
                    "(expected STRING or NUMERIC)"
                )
            attributes.append(Attribute(attr_name, domain))
        if not attributes:
            raise SchemaError(f"table {table_name!r} declares no attributes")
        tables.append(Table(table_name, tuple(attributes)))
    return Schema(tuple(tables))


def load_schema_file(path) -> Schema:
    with open(path, encoding="utf-8") as fh:
        return load_schema(fh.read())
