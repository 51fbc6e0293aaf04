"""Pure-Python Part 21 token scanner (fallback implementation).

One master regex, applied left to right; any gap between matches is a
syntax error at that offset.
"""

from __future__ import annotations

import re

from cadaug.errors import StepSyntaxError
from cadaug.step import tokens as tk

# Order matters: REAL must beat INTEGER; a keyword may contain hyphens
# (section delimiters like END-ISO-10303-21 are scanned as one keyword).
# Strings are scanned manually: the '' quote escape needs greedy
# lookahead, and regex backtracking would mis-lex runs like '''.
_MASTER = re.compile(
    r"""
      (?P<SKIP>\s+|/\*.*?\*/)
    | (?P<REF>\#\d+)
    | (?P<KEYWORD>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
    | (?P<REAL>[+-]?\d+\.\d*(?:[Ee][+-]?\d+)?|[+-]?\d+[Ee][+-]?\d+)
    | (?P<INTEGER>[+-]?\d+)
    | (?P<ENUM>\.[A-Za-z_][A-Za-z0-9_]*\.)
    | (?P<BINARY>"[0-9A-Fa-f]*")
    | (?P<LPAREN>\()
    | (?P<RPAREN>\))
    | (?P<COMMA>,)
    | (?P<SEMI>;)
    | (?P<EQ>=)
    | (?P<STAR>\*)
    | (?P<DOLLAR>\$)
    """,
    re.VERBOSE | re.DOTALL,
)


def _scan_string(text: str, start: int) -> int:
    """End offset of the string literal opening at `start`; a doubled
    quote is an escaped quote, greedily."""
    pos = start + 1
    n = len(text)
    while True:
        if pos >= n:
            raise StepSyntaxError(start, "unterminated string")
        if text[pos] == "'":
            if pos + 1 < n and text[pos + 1] == "'":
                pos += 2
                continue
            return pos + 1
        pos += 1

_KIND = {
    "REF": tk.REF,
    "KEYWORD": tk.KEYWORD,
    "REAL": tk.REAL,
    "INTEGER": tk.INTEGER,
    "ENUM": tk.ENUM,
    "BINARY": tk.BINARY,
    "LPAREN": tk.LPAREN,
    "RPAREN": tk.RPAREN,
    "COMMA": tk.COMMA,
    "SEMI": tk.SEMI,
    "EQ": tk.EQ,
    "STAR": tk.STAR,
    "DOLLAR": tk.DOLLAR,
}


def scan(text: str) -> list[tuple[int, int, int]]:
    """Tokenize `text`, returning (kind, start, end) tuples."""
    out: list[tuple[int, int, int]] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos] == "'":
            end = _scan_string(text, pos)
            out.append((tk.STRING, pos, end))
            pos = end
            continue
        m = _MASTER.match(text, pos)
        if m is None:
            ch = text[pos]
            if ch == "/":
                raise StepSyntaxError(pos, "unterminated comment")
            raise StepSyntaxError(pos, f"unexpected character {ch!r}")
        group = m.lastgroup
        if group != "SKIP":
            out.append((_KIND[group], m.start(), m.end()))
        pos = m.end()
    return out
