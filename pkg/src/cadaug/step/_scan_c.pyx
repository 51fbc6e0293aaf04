# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Part 21 token scanner.

Kind codes and error behaviour must stay identical to ``_scan_py.scan``;
``tests/test_scan_impls.py`` cross-checks the two on every fixture.
"""

from cadaug.errors import StepSyntaxError

# Mirrors cadaug.step.tokens; keep in sync.
DEF K_KEYWORD = 0
DEF K_INTEGER = 1
DEF K_REAL = 2
DEF K_STRING = 3
DEF K_ENUM = 4
DEF K_REF = 5
DEF K_LPAREN = 6
DEF K_RPAREN = 7
DEF K_COMMA = 8
DEF K_SEMI = 9
DEF K_EQ = 10
DEF K_STAR = 11
DEF K_DOLLAR = 12
DEF K_BINARY = 13


cdef inline bint _is_space(Py_UCS4 c):
    return c == u' ' or c == u'\t' or c == u'\n' or c == u'\r' or c == u'\x0c' or c == u'\x0b'

cdef inline bint _is_digit(Py_UCS4 c):
    return u'0' <= c <= u'9'

cdef inline bint _is_alpha(Py_UCS4 c):
    return (u'a' <= c <= u'z') or (u'A' <= c <= u'Z') or c == u'_'

cdef inline bint _is_alnum(Py_UCS4 c):
    return _is_alpha(c) or _is_digit(c)

cdef inline bint _is_hex(Py_UCS4 c):
    return _is_digit(c) or (u'a' <= c <= u'f') or (u'A' <= c <= u'F')


def scan(str text):
    """Tokenize `text`, returning (kind, start, end) tuples."""
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t start
    cdef Py_UCS4 c
    cdef int kind
    cdef bint has_dot, has_exp
    out = []

    while pos < n:
        c = text[pos]

        if _is_space(c):
            pos += 1
            continue

        if c == u'/' and pos + 1 < n and text[pos + 1] == u'*':
            start = pos
            pos += 2
            while pos + 1 < n and not (text[pos] == u'*' and text[pos + 1] == u'/'):
                pos += 1
            if pos + 1 >= n:
                raise StepSyntaxError(start, "unterminated comment")
            pos += 2
            continue

        start = pos

        if c == u'#':
            pos += 1
            if pos >= n or not _is_digit(text[pos]):
                raise StepSyntaxError(start, "unexpected character '#'")
            while pos < n and _is_digit(text[pos]):
                pos += 1
            out.append((K_REF, start, pos))
            continue

        if _is_alpha(c):
            pos += 1
            while pos < n:
                c = text[pos]
                if _is_alnum(c):
                    pos += 1
                elif c == u'-' and pos + 1 < n and _is_alnum(text[pos + 1]):
                    pos += 1
                else:
                    break
            out.append((K_KEYWORD, start, pos))
            continue

        if _is_digit(c) or ((c == u'+' or c == u'-') and pos + 1 < n and _is_digit(text[pos + 1])):
            pos += 1
            while pos < n and _is_digit(text[pos]):
                pos += 1
            has_dot = False
            has_exp = False
            if pos < n and text[pos] == u'.':
                # a dot starts the fraction only if not an enum such as .T.
                has_dot = True
                pos += 1
                while pos < n and _is_digit(text[pos]):
                    pos += 1
            if pos < n and (text[pos] == u'E' or text[pos] == u'e'):
                if pos + 1 < n and (_is_digit(text[pos + 1]) or
                                    ((text[pos + 1] == u'+' or text[pos + 1] == u'-')
                                     and pos + 2 < n and _is_digit(text[pos + 2]))):
                    has_exp = True
                    pos += 1
                    if text[pos] == u'+' or text[pos] == u'-':
                        pos += 1
                    while pos < n and _is_digit(text[pos]):
                        pos += 1
            kind = K_REAL if (has_dot or has_exp) else K_INTEGER
            out.append((kind, start, pos))
            continue

        if c == u"'":
            pos += 1
            while True:
                if pos >= n:
                    raise StepSyntaxError(start, "unterminated string")
                if text[pos] == u"'":
                    if pos + 1 < n and text[pos + 1] == u"'":
                        pos += 2  # escaped quote
                        continue
                    pos += 1
                    break
                pos += 1
            out.append((K_STRING, start, pos))
            continue

        if c == u'.':
            pos += 1
            if pos < n and _is_alpha(text[pos]):
                pos += 1
                while pos < n and _is_alnum(text[pos]):
                    pos += 1
                if pos < n and text[pos] == u'.':
                    pos += 1
                    out.append((K_ENUM, start, pos))
                    continue
            raise StepSyntaxError(start, "unexpected character '.'")

        if c == u'"':
            pos += 1
            while pos < n and _is_hex(text[pos]):
                pos += 1
            if pos >= n or text[pos] != u'"':
                raise StepSyntaxError(start, "unexpected character '\"'")
            pos += 1
            out.append((K_BINARY, start, pos))
            continue

        if c == u'(':
            out.append((K_LPAREN, start, pos + 1))
        elif c == u')':
            out.append((K_RPAREN, start, pos + 1))
        elif c == u',':
            out.append((K_COMMA, start, pos + 1))
        elif c == u';':
            out.append((K_SEMI, start, pos + 1))
        elif c == u'=':
            out.append((K_EQ, start, pos + 1))
        elif c == u'*':
            out.append((K_STAR, start, pos + 1))
        elif c == u'$':
            out.append((K_DOLLAR, start, pos + 1))
        else:
            raise StepSyntaxError(start, f"unexpected character {chr(c)!r}")
        pos += 1

    return out
