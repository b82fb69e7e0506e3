"""Recursive-descent parser for QScript (.qs files).

Grammar:
    program := stmt*
    stmt    := "var" IDENT "=" expr ";" | IDENT "=" expr ";" | IDENT "+=" expr ";"
             | "if" "(" cond ")" block ("else" block)? | "while" "(" cond ")" block
             | "executeQuery" "(" expr ")" ";"
    block   := "{" stmt* "}"
    expr    := term ("+" term)*
    term    := STRING | IDENT | "getParam" "(" STRING ")"
             | "sanitize_string" "(" expr ")" | "sanitize_numeric" "(" expr ")"
    cond    := expr ("==" | "!=" | "<" | "<=" | ">" | ">=") expr

String literals use double quotes with \" and \\ escapes; any other character
(including newlines) stands for itself. Sanitizer call syntax is rejected
unless allow_sanitizers is set, so user-authored inputs cannot smuggle
Sanitize nodes past the instrumenter.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import (
    NUMERIC_SANITIZER,
    STRING_SANITIZER,
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
)

KEYWORDS = frozenset(
    ["var", "if", "else", "while", "executeQuery", "getParam",
     "sanitize_string", "sanitize_numeric"]
)

_PUNCT = ("+=", "==", "!=", "<=", ">=", "+", "=", "<", ">", "(", ")", "{", "}", ";")


class QScriptSyntaxError(Exception):
    def __init__(self, message: str, loc: SourceLocation):
        super().__init__(f"{loc}: {message}")
        self.message = message
        self.loc = loc


@dataclass(frozen=True)
class _Token:
    type: str  # "ident", "keyword", "string", "eof", or the punctuation itself
    value: str
    loc: SourceLocation


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_ident_part(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


def _tokenize(source: str, filename: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def loc() -> SourceLocation:
        return SourceLocation(filename, line, col)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        start = loc()
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_part(source[j]):
                j += 1
            word = source[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(_Token(kind, word, start))
            advance(j - i)
            continue
        if ch == '"':
            advance(1)
            parts: list[str] = []
            while True:
                if i >= n:
                    raise QScriptSyntaxError("unterminated string literal", start)
                ch = source[i]
                if ch == '"':
                    advance(1)
                    break
                if ch == "\\":
                    if i + 1 >= n or source[i + 1] not in ('"', "\\"):
                        raise QScriptSyntaxError(
                            "invalid escape; only \\\" and \\\\ are recognized", loc()
                        )
                    parts.append(source[i + 1])
                    advance(2)
                    continue
                parts.append(ch)
                advance(1)
            tokens.append(_Token("string", "".join(parts), start))
            continue
        for punct in _PUNCT:
            if source.startswith(punct, i):
                tokens.append(_Token(punct, punct, start))
                advance(len(punct))
                break
        else:
            raise QScriptSyntaxError(f"unexpected character {ch!r}", start)
    tokens.append(_Token("eof", "", loc()))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], allow_sanitizers: bool):
        self._tokens = tokens
        self._pos = 0
        self._allow_sanitizers = allow_sanitizers

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _expect(self, type_: str, what: str | None = None) -> _Token:
        tok = self._peek()
        if tok.type != type_:
            expected = what or f"'{type_}'"
            found = tok.value if tok.type != "eof" else "end of input"
            raise QScriptSyntaxError(f"expected {expected}, found {found!r}", tok.loc)
        return self._advance()

    def _expect_keyword(self, word: str) -> _Token:
        tok = self._peek()
        if tok.type != "keyword" or tok.value != word:
            raise QScriptSyntaxError(
                f"expected '{word}', found {tok.value!r}", tok.loc
            )
        return self._advance()

    # -- statements ---------------------------------------------------------

    def parse_program(self) -> Program:
        stmts: list[Stmt] = []
        while self._peek().type != "eof":
            stmts.append(self._statement())
        return tuple(stmts)

    def _statement(self) -> Stmt:
        tok = self._peek()
        if tok.type == "keyword":
            if tok.value == "var":
                return self._var_decl()
            if tok.value == "if":
                return self._if()
            if tok.value == "while":
                return self._while()
            if tok.value == "executeQuery":
                return self._execute_query()
            raise QScriptSyntaxError(
                f"expected a statement, found {tok.value!r}", tok.loc
            )
        if tok.type == "ident":
            return self._assign_or_concat()
        raise QScriptSyntaxError(
            f"expected a statement, found {tok.value!r}", tok.loc
        )

    def _var_decl(self) -> Stmt:
        kw = self._expect_keyword("var")
        name = self._expect("ident", "identifier")
        self._expect("=")
        value = self._expression()
        self._expect(";")
        return VarDecl(name.value, value, loc=kw.loc)

    def _assign_or_concat(self) -> Stmt:
        name = self._advance()
        op = self._peek()
        if op.type == "=":
            self._advance()
            value = self._expression()
            self._expect(";")
            return Assign(name.value, value, loc=name.loc)
        if op.type == "+=":
            self._advance()
            value = self._expression()
            self._expect(";")
            return ConcatAssign(name.value, value, loc=name.loc)
        raise QScriptSyntaxError(
            f"expected '=' or '+=', found {op.value!r}", op.loc
        )

    def _if(self) -> Stmt:
        kw = self._expect_keyword("if")
        self._expect("(")
        cond = self._cond()
        self._expect(")")
        then = self._block()
        orelse: tuple[Stmt, ...] = ()
        nxt = self._peek()
        if nxt.type == "keyword" and nxt.value == "else":
            self._advance()
            orelse = self._block()
        return If(cond, then, orelse, loc=kw.loc)

    def _while(self) -> Stmt:
        kw = self._expect_keyword("while")
        self._expect("(")
        cond = self._cond()
        self._expect(")")
        body = self._block()
        return While(cond, body, loc=kw.loc)

    def _execute_query(self) -> Stmt:
        kw = self._expect_keyword("executeQuery")
        self._expect("(")
        value = self._expression()
        self._expect(")")
        self._expect(";")
        return ExecuteQuery(value, loc=kw.loc)

    def _block(self) -> tuple[Stmt, ...]:
        self._expect("{")
        stmts: list[Stmt] = []
        while self._peek().type != "}":
            if self._peek().type == "eof":
                raise QScriptSyntaxError("expected '}'", self._peek().loc)
            stmts.append(self._statement())
        self._expect("}")
        return tuple(stmts)

    # -- expressions --------------------------------------------------------

    def _cond(self) -> Cond:
        left = self._expression()
        tok = self._peek()
        if tok.type not in ("==", "!=", "<", "<=", ">", ">="):
            raise QScriptSyntaxError(
                f"expected a comparison operator, found {tok.value!r}", tok.loc
            )
        self._advance()
        right = self._expression()
        return Cond(left, tok.type, right, loc=tok.loc)

    def _expression(self) -> Expr:
        expr = self._term()
        while self._peek().type == "+":
            plus = self._advance()
            right = self._term()
            expr = Concat(expr, right, loc=plus.loc)
        return expr

    def _term(self) -> Expr:
        tok = self._peek()
        if tok.type == "string":
            self._advance()
            return StringLiteral(tok.value, loc=tok.loc)
        if tok.type == "ident":
            self._advance()
            return VarRef(tok.value, loc=tok.loc)
        if tok.type == "keyword" and tok.value == "getParam":
            self._advance()
            self._expect("(")
            param = self._expect("string", "string literal")
            self._expect(")")
            return GetParam(param.value, loc=tok.loc)
        if tok.type == "keyword" and tok.value in ("sanitize_string", "sanitize_numeric"):
            if not self._allow_sanitizers:
                raise QScriptSyntaxError(
                    f"{tok.value} calls are not allowed in input programs "
                    "(reparse instrumented output with allow_sanitizers)",
                    tok.loc,
                )
            self._advance()
            self._expect("(")
            value = self._expression()
            self._expect(")")
            kind = STRING_SANITIZER if tok.value == "sanitize_string" else NUMERIC_SANITIZER
            return Sanitize(kind, value, loc=tok.loc)
        raise QScriptSyntaxError(
            f"expected an expression, found {tok.value or 'end of input'!r}", tok.loc
        )


def parse_program(source: str, filename: str = "<input>",
                  allow_sanitizers: bool = False) -> Program:
    """Parse QScript source text into a program AST.

    Raises QScriptSyntaxError with file/line/column and an expected-token
    message on malformed input.
    """
    tokens = _tokenize(source, filename)
    parser = _Parser(tokens, allow_sanitizers)
    return parser.parse_program()


def parse_file(path, allow_sanitizers: bool = False) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read(), filename=str(path),
                             allow_sanitizers=allow_sanitizers)
