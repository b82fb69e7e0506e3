# cython: language_level=3
"""Compiled sanitizer kernels: the same scans as _sanitize_py, with typed
indices and bulk span copies. Selected at import by runtime.sanitizers."""


def sanitize_string(str s not None):
    """Escape unescaped quote/backslash characters with a backslash.

    One-character lookahead keeps already-escaped pairs intact; a trailing or
    otherwise dangling backslash is doubled. Total and idempotent.
    """
    cdef Py_ssize_t i = 0, start = 0, n = len(s)
    cdef Py_UCS4 ch, nxt
    cdef list out = None
    while i < n:
        ch = s[i]
        if ch == u"\\":
            if i + 1 < n:
                nxt = s[i + 1]
                if nxt == u"'" or nxt == u'"' or nxt == u"\\":
                    i += 2
                    continue
            if out is None:
                out = []
            out.append(s[start:i])
            out.append("\\\\")
            i += 1
            start = i
        elif ch == u"'" or ch == u'"':
            if out is None:
                out = []
            out.append(s[start:i])
            out.append("\\")
            start = i
            i += 1
        else:
            i += 1
    if out is None:
        return s
    out.append(s[start:])
    return "".join(out)


def sanitize_numeric(str s not None):
    """Return s verbatim when it is a numeral (`-? digits (. digits)?` with
    optional surrounding ASCII whitespace), otherwise the text `null`."""
    cdef Py_ssize_t i = 0, end = len(s), digits
    cdef Py_UCS4 ch
    while i < end:
        ch = s[i]
        if ch == u" " or ch == u"\t" or ch == u"\n" or ch == u"\r" or ch == u"\f" or ch == u"\v":
            i += 1
        else:
            break
    while end > i:
        ch = s[end - 1]
        if ch == u" " or ch == u"\t" or ch == u"\n" or ch == u"\r" or ch == u"\f" or ch == u"\v":
            end -= 1
        else:
            break
    if i >= end:
        return "null"
    if s[i] == u"-":
        i += 1
    digits = 0
    while i < end:
        ch = s[i]
        if u"0" <= ch <= u"9":
            i += 1
            digits += 1
        else:
            break
    if digits == 0:
        return "null"
    if i < end and s[i] == u".":
        i += 1
        digits = 0
        while i < end:
            ch = s[i]
            if u"0" <= ch <= u"9":
                i += 1
                digits += 1
            else:
                break
        if digits == 0:
            return "null"
    return s if i == end else "null"
