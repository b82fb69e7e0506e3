"""Pure-Python sanitizer kernels.

Reference implementations of the two sanitizers; a Cython build of the same
scans (_sanitize_cy) is preferred at import time when available. Both run in
a single left-to-right pass, linear in the input length.
"""

from __future__ import annotations

_ESCAPABLE = ("'", '"', "\\")
_WHITESPACE = " \t\n\r\f\v"


def sanitize_string(s: str) -> str:
    """Escape unescaped quote/backslash characters with a backslash.

    The scan looks ahead one character: a backslash already escaping one of
    {', ", \\} passes through untouched (no double escaping), a backslash
    escaping nothing -- including one ending the string -- is doubled, and
    bare quotes gain a backslash. Everything else is copied verbatim, so the
    function is total and idempotent.
    """
    if "'" not in s and '"' not in s and "\\" not in s:
        return s
    out: list[str] = []
    start = 0  # first index not yet flushed to out
    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch == "\\":
            if i + 1 < n and s[i + 1] in _ESCAPABLE:
                i += 2  # already-escaped pair, keep as is
                continue
            out.append(s[start:i])
            out.append("\\\\")
            i += 1
            start = i
        elif ch == "'" or ch == '"':
            out.append(s[start:i])
            out.append("\\")
            start = i  # the quote itself is flushed with the next span
            i += 1
        else:
            i += 1
    out.append(s[start:])
    return "".join(out)


def sanitize_numeric(s: str) -> str:
    """Return s verbatim when it is a numeral (`-? digits (. digits)?`,
    optional surrounding ASCII whitespace), otherwise the text `null`."""
    i = 0
    n = len(s)
    while i < n and s[i] in _WHITESPACE:
        i += 1
    end = n
    while end > i and s[end - 1] in _WHITESPACE:
        end -= 1
    if i >= end:
        return "null"
    if s[i] == "-":
        i += 1
    digits = 0
    while i < end and "0" <= s[i] <= "9":
        i += 1
        digits += 1
    if digits == 0:
        return "null"
    if i < end and s[i] == ".":
        i += 1
        digits = 0
        while i < end and "0" <= s[i] <= "9":
            i += 1
            digits += 1
        if digits == 0:
            return "null"
    return s if i == end else "null"
