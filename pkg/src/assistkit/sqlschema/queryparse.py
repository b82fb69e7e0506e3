"""Parse abstract queries against a SQL subset and bind placeholders.

The subset covers the query shapes the analysis needs to judge:

    SELECT select-list FROM table [WHERE disjunction]
    INSERT INTO table (col, ...) VALUES (value, ...)
    UPDATE table SET col = value [, col = value]* [WHERE disjunction]
    DELETE FROM table [WHERE disjunction]

where a disjunction is OR-joined conjunctions of comparisons
(=, <>, <, <=, >, >=), and a value is a single-quoted string (backslash
escapes), a numeral, NULL, or a placeholder. Keywords and names are
case-insensitive.

A placeholder is legal only in a value position: inside a quoted string
(string position) or bare (numeric position). Each such occurrence is bound
to the attribute it is compared with or assigned to, and that attribute's
schema domain later selects the sanitizer. A placeholder anywhere else makes
the query Invalid ("placeholder in structural position"), as do unknown
tables/attributes and plain syntax errors -- such queries are discarded as
artifacts of infeasible paths.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..qfs import AbstractQuery, Literal, Placeholder
from .schema import Attribute, Domain, Schema

SQL_KEYWORDS = frozenset(
    ["SELECT", "FROM", "WHERE", "AND", "OR", "INSERT", "INTO", "VALUES",
     "UPDATE", "SET", "DELETE", "NULL"]
)

_COMPARE_OPS = ("=", "<>", "<", "<=", ">", ">=")


# ---------------------------------------------------------------------------
# Outcome types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Binding:
    """One placeholder occurrence bound to the attribute governing its type."""

    placeholder: int  # flow node id
    table: str
    attribute: str
    domain: Domain


@dataclass(frozen=True)
class Valid:
    bindings: tuple[Binding, ...]


@dataclass(frozen=True)
class Invalid:
    segment_index: int
    message: str


@dataclass(frozen=True)
class ParseOutcome:
    query: AbstractQuery
    status: Valid | Invalid

    @property
    def is_valid(self) -> bool:
        return isinstance(self.status, Valid)


class _Fail(Exception):
    def __init__(self, segment_index: int, message: str):
        super().__init__(message)
        self.segment_index = segment_index
        self.message = message


# ---------------------------------------------------------------------------
# Lexer over query segments
# ---------------------------------------------------------------------------
#
# Token types: "ident", "number", "string", "placeholder", "op", "star",
# "lparen", "rparen", "comma", "eof". A string token's value is a tuple of
# parts: text chunks and placeholder node ids (ints) for placeholders that
# occurred inside the quotes.

@dataclass(frozen=True)
class _Token:
    type: str
    value: object
    seg: int


def _lex(query: AbstractQuery) -> list[_Token]:
    tokens: list[_Token] = []
    in_string = False
    string_seg = 0
    parts: list[object] = []
    buf: list[str] = []

    def flush_text() -> None:
        if buf:
            parts.append("".join(buf))
            buf.clear()

    for si, seg in enumerate(query.segments):
        if isinstance(seg, Placeholder):
            if in_string:
                flush_text()
                parts.append(seg.node)
            else:
                tokens.append(_Token("placeholder", seg.node, si))
            continue
        text = seg.text
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if in_string:
                if ch == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    i += 2
                    continue
                if ch == "'":
                    in_string = False
                    flush_text()
                    tokens.append(_Token("string", tuple(parts), string_seg))
                    parts = []
                    i += 1
                    continue
                buf.append(ch)
                i += 1
                continue
            if ch in " \t\r\n":
                i += 1
                continue
            if ch == "'":
                in_string = True
                string_seg = si
                parts = []
                buf = []
                i += 1
                continue
            if ch.isascii() and (ch.isalpha() or ch == "_"):
                j = i
                while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                tokens.append(_Token("ident", text[i:j], si))
                i = j
                continue
            if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
                j = i + 1
                while j < n and text[j].isdigit():
                    j += 1
                if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                    j += 1
                    while j < n and text[j].isdigit():
                        j += 1
                tokens.append(_Token("number", text[i:j], si))
                i = j
                continue
            if ch == "*":
                tokens.append(_Token("star", "*", si))
                i += 1
                continue
            if ch == "(":
                tokens.append(_Token("lparen", "(", si))
                i += 1
                continue
            if ch == ")":
                tokens.append(_Token("rparen", ")", si))
                i += 1
                continue
            if ch == ",":
                tokens.append(_Token("comma", ",", si))
                i += 1
                continue
            if ch == "<":
                if i + 1 < n and text[i + 1] == ">":
                    tokens.append(_Token("op", "<>", si))
                    i += 2
                elif i + 1 < n and text[i + 1] == "=":
                    tokens.append(_Token("op", "<=", si))
                    i += 2
                else:
                    tokens.append(_Token("op", "<", si))
                    i += 1
                continue
            if ch == ">":
                if i + 1 < n and text[i + 1] == "=":
                    tokens.append(_Token("op", ">=", si))
                    i += 2
                else:
                    tokens.append(_Token("op", ">", si))
                    i += 1
                continue
            if ch == "=":
                tokens.append(_Token("op", "=", si))
                i += 1
                continue
            raise _Fail(si, f"unexpected character {ch!r} in query")
    if in_string:
        raise _Fail(string_seg, "unterminated string literal in query")
    last_seg = len(query.segments) - 1 if query.segments else 0
    tokens.append(_Token("eof", None, last_seg))
    return tokens


# ---------------------------------------------------------------------------
# Values as the parser sees them
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Value:
    kind: str  # "string" | "number" | "null" | "placeholder"
    placeholders: tuple[int, ...]
    seg: int


class _Parser:
    def __init__(self, tokens: list[_Token], schema: Schema):
        self._tokens = tokens
        self._pos = 0
        self._schema = schema
        self._table = None
        self.bindings: list[Binding] = []

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _fail(self, message: str) -> None:
        raise _Fail(self._peek().seg, message)

    def _check_structural(self, expected: str) -> None:
        if self._peek().type == "placeholder":
            raise _Fail(self._peek().seg, "placeholder in structural position")

    def _expect_keyword(self, word: str) -> None:
        self._check_structural(word)
        tok = self._peek()
        if tok.type != "ident" or tok.value.upper() != word:
            self._fail(f"expected {word}")
        self._advance()

    def _at_keyword(self, word: str) -> bool:
        tok = self._peek()
        return tok.type == "ident" and tok.value.upper() == word

    def _expect_name(self, what: str) -> str:
        self._check_structural(what)
        tok = self._peek()
        if tok.type != "ident" or tok.value.upper() in SQL_KEYWORDS:
            self._fail(f"expected {what}")
        return self._advance().value

    def _expect(self, type_: str, what: str) -> _Token:
        self._check_structural(what)
        tok = self._peek()
        if tok.type != type_:
            self._fail(f"expected {what}")
        return self._advance()

    def _named(self, what: str) -> tuple[str, int]:
        seg = self._peek().seg
        return self._expect_name(what), seg

    # -- statements ---------------------------------------------------------

    def parse(self) -> list[Binding]:
        tok = self._peek()
        if tok.type == "placeholder":
            raise _Fail(tok.seg, "placeholder in structural position")
        if tok.type != "ident":
            self._fail("expected a SQL statement keyword")
        keyword = tok.value.upper()
        if keyword == "SELECT":
            self._select()
        elif keyword == "INSERT":
            self._insert()
        elif keyword == "UPDATE":
            self._update()
        elif keyword == "DELETE":
            self._delete()
        else:
            self._fail("expected SELECT, INSERT, UPDATE, or DELETE")
        if self._peek().type != "eof":
            self._fail("unexpected trailing content after statement")
        return self.bindings

    def _resolve_table(self, name: str, seg: int) -> None:
        table = self._schema.table(name)
        if table is None:
            raise _Fail(seg, f"unknown table {name!r}")
        self._table = table

    def _resolve_attribute(self, name: str, seg: int) -> Attribute:
        attr = self._table.attribute(name)
        if attr is None:
            raise _Fail(
                seg, f"unknown attribute {name!r} in table {self._table.name!r}"
            )
        return attr

    def _select(self) -> None:
        self._expect_keyword("SELECT")
        # select list: * or column names (validated after FROM resolves the table)
        selected: list[tuple[str, int]] = []
        if self._peek().type == "star":
            self._advance()
        else:
            selected.append(self._named("column name or *"))
            while self._peek().type == "comma":
                self._advance()
                selected.append(self._named("column name"))
        self._expect_keyword("FROM")
        self._resolve_table(*self._named("table name"))
        for name, name_seg in selected:
            self._resolve_attribute(name, name_seg)
        self._optional_where()

    def _insert(self) -> None:
        self._expect_keyword("INSERT")
        self._expect_keyword("INTO")
        self._resolve_table(*self._named("table name"))
        self._expect("lparen", "'('")
        columns: list[Attribute] = []
        columns.append(self._resolve_attribute(*self._named("column name")))
        while self._peek().type == "comma":
            self._advance()
            columns.append(self._resolve_attribute(*self._named("column name")))
        self._expect("rparen", "')'")
        self._expect_keyword("VALUES")
        self._expect("lparen", "'('")
        values: list[_Value] = [self._value()]
        while self._peek().type == "comma":
            self._advance()
            values.append(self._value())
        self._expect("rparen", "')'")
        if len(values) != len(columns):
            self._fail(
                f"INSERT arity mismatch: {len(columns)} columns, {len(values)} values"
            )
        for attr, value in zip(columns, values):
            self._bind(value, attr)

    def _update(self) -> None:
        self._expect_keyword("UPDATE")
        self._resolve_table(*self._named("table name"))
        self._expect_keyword("SET")
        self._set_pair()
        while self._peek().type == "comma":
            self._advance()
            self._set_pair()
        self._optional_where()

    def _set_pair(self) -> None:
        attr = self._resolve_attribute(*self._named("column name"))
        tok = self._expect("op", "'='")
        if tok.value != "=":
            raise _Fail(tok.seg, "expected '=' in SET clause")
        value = self._value()
        self._bind(value, attr)

    def _delete(self) -> None:
        self._expect_keyword("DELETE")
        self._expect_keyword("FROM")
        self._resolve_table(*self._named("table name"))
        self._optional_where()

    # -- conditions ---------------------------------------------------------

    def _optional_where(self) -> None:
        if self._at_keyword("WHERE"):
            self._advance()
            self._disjunction()

    def _disjunction(self) -> None:
        self._conjunction()
        while self._at_keyword("OR"):
            self._advance()
            self._conjunction()

    def _conjunction(self) -> None:
        self._comparison()
        while self._at_keyword("AND"):
            self._advance()
            self._comparison()

    def _comparison(self) -> None:
        left = self._operand()
        tok = self._peek()
        if tok.type != "op" or tok.value not in _COMPARE_OPS:
            self._fail("expected a comparison operator")
        self._advance()
        right = self._operand()

        left_attr = isinstance(left, Attribute)
        right_attr = isinstance(right, Attribute)
        if left_attr and right_attr:
            return
        if left_attr:
            self._bind(right, left)
        elif right_attr:
            self._bind(left, right)
        else:
            # value-to-value comparison: fine for pure literals, but a
            # placeholder here has no attribute to take a type from
            for value in (left, right):
                if value.placeholders:
                    raise _Fail(
                        value.seg, "placeholder not compared with an attribute"
                    )

    def _operand(self):
        tok = self._peek()
        if tok.type == "ident" and tok.value.upper() not in SQL_KEYWORDS:
            self._advance()
            return self._resolve_attribute(tok.value, tok.seg)
        return self._value()

    def _value(self) -> _Value:
        tok = self._peek()
        if tok.type == "string":
            self._advance()
            phs = tuple(p for p in tok.value if isinstance(p, int))
            return _Value("string", phs, tok.seg)
        if tok.type == "number":
            self._advance()
            return _Value("number", (), tok.seg)
        if tok.type == "placeholder":
            self._advance()
            return _Value("placeholder", (tok.value,), tok.seg)
        if tok.type == "ident" and tok.value.upper() == "NULL":
            self._advance()
            return _Value("null", (), tok.seg)
        self._fail("expected a value (string, numeral, NULL, or input)")

    def _bind(self, value: _Value, attr: Attribute) -> None:
        for node in value.placeholders:
            self.bindings.append(
                Binding(node, self._table.name, attr.name, attr.domain)
            )


def parse_abstract_query(query: AbstractQuery, schema: Schema) -> ParseOutcome:
    """Parse one abstract query; Valid outcomes carry one binding per
    placeholder occurrence, Invalid ones the first failing segment index."""
    try:
        tokens = _lex(query)
        bindings = _Parser(tokens, schema).parse()
    except _Fail as fail:
        return ParseOutcome(query, Invalid(fail.segment_index, fail.message))
    occurrences = len(query.placeholders())
    if len(bindings) != occurrences:
        # Defensive: the grammar above binds every value-position placeholder
        # and rejects all others, so this should be unreachable.
        return ParseOutcome(
            query,
            Invalid(0, f"bound {len(bindings)} of {occurrences} placeholder occurrences"),
        )
    return ParseOutcome(query, Valid(tuple(bindings)))


# ---------------------------------------------------------------------------
# Concrete rendering and token shapes (used by tests and the eval harness)
# ---------------------------------------------------------------------------

def render_concrete(query: AbstractQuery, outcome: ParseOutcome) -> str:
    """Replace placeholders with representative values: bare ones become 'v'
    or 0 according to their bound domain, quoted ones become the text v."""
    domains: dict[int, str] = {}
    if isinstance(outcome.status, Valid):
        for binding in outcome.status.bindings:
            domains.setdefault(binding.placeholder, binding.domain.kind)
    out: list[str] = []
    in_string = False
    for seg in query.segments:
        if isinstance(seg, Placeholder):
            if in_string:
                out.append("v")
            elif domains.get(seg.node) == "numeric":
                out.append("0")
            else:
                out.append("'v'")
            continue
        text = seg.text
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if in_string and ch == "\\" and i + 1 < n:
                i += 2
                continue
            if ch == "'":
                in_string = not in_string
            i += 1
        out.append(text)
    return "".join(out)


STR_TOKEN = "«STR»"
VAL_TOKEN = "«NUM»"


def query_shape(query: AbstractQuery, schema: Schema) -> tuple[str, ...] | None:
    """Token shape of a query that parses under the subset, else None.

    Strings map to one STR bucket; numerals, NULL, and bare placeholders to
    one value bucket (the numeric sanitizer legitimately rewrites non-numerals
    to null, which must not read as a structure change). Identifiers and
    keywords are case-folded; operators and punctuation pass through.
    """
    outcome = parse_abstract_query(query, schema)
    if not outcome.is_valid:
        return None
    shape: list[str] = []
    for tok in _lex(query):
        if tok.type == "eof":
            break
        if tok.type == "ident":
            upper = tok.value.upper()
            shape.append(VAL_TOKEN if upper == "NULL" else upper)
        elif tok.type == "string":
            shape.append(STR_TOKEN)
        elif tok.type in ("number", "placeholder"):
            shape.append(VAL_TOKEN)
        else:
            shape.append(str(tok.value))
    return tuple(shape)


def concrete_shape(text: str, schema: Schema) -> tuple[str, ...] | None:
    """Token shape of a concrete (logged) query, or None if it does not parse."""
    return query_shape(AbstractQuery((Literal(text),)), schema)
