"""Recursive-descent parser for ISO 10303-21 exchange files."""

from __future__ import annotations

import os

from cadaug.errors import DuplicateId, MissingSection, StepSyntaxError
from cadaug.step import tokens as tk
from cadaug.step.model import (
    Arg, ArgList, Binary, Complex, DOLLAR, Entity, EntityRef, EnumToken,
    HeaderRecord, Integer, Real, STAR, Simple, StepFile, String, Typed,
    valid_keyword,
)
from cadaug.step.scan import scan


def count_content_lines(text: str) -> int:
    """Non-empty lines over the whole file; blank lines are formatting
    noise and differ across exporters."""
    return sum(1 for line in text.splitlines() if line.strip())


def parse_step(text: str) -> StepFile:
    """Parse a Part 21 document into an entity graph.

    Raises StepSyntaxError on malformed tokens or grammar violations,
    MissingSection if HEADER or DATA is absent, DuplicateId on a
    redefined #id.
    """
    return _Parser(text).parse_file()


def load_step(path: str | os.PathLike) -> StepFile:
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        return parse_step(fh.read())


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = scan(text)
        self.i = 0

    # --- token helpers ---

    def _peek(self) -> tuple[int, int, int] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _next(self) -> tuple[int, int, int]:
        tok = self._peek()
        if tok is None:
            raise StepSyntaxError(len(self.text), "unexpected end of input")
        self.i += 1
        return tok

    def _lexeme(self, tok: tuple[int, int, int]) -> str:
        return self.text[tok[1]:tok[2]]

    def _expect(self, kind: int) -> tuple[int, int, int]:
        tok = self._next()
        if tok[0] != kind:
            raise StepSyntaxError(
                tok[1], f"expected {tk.NAMES[kind]}, found {self._lexeme(tok)!r}")
        return tok

    def _expect_keyword(self, word: str) -> None:
        tok = self._expect(tk.KEYWORD)
        if self._lexeme(tok) != word:
            raise StepSyntaxError(
                tok[1], f"expected {word}, found {self._lexeme(tok)!r}")
        self._expect(tk.SEMI)

    def _at_keyword(self, word: str) -> bool:
        tok = self._peek()
        return tok is not None and tok[0] == tk.KEYWORD and self._lexeme(tok) == word

    # --- grammar ---

    def parse_file(self) -> StepFile:
        if not self.toks:
            raise StepSyntaxError(0, "empty input")
        self._expect_keyword("ISO-10303-21")

        if not self._at_keyword("HEADER"):
            raise MissingSection("HEADER section not found")
        self._next()
        self._expect(tk.SEMI)
        header = []
        while not self._at_keyword("ENDSEC"):
            header.append(self._parse_header_record())
        self._next()
        self._expect(tk.SEMI)

        if not self._at_keyword("DATA"):
            raise MissingSection("DATA section not found")
        self._next()
        self._expect(tk.SEMI)
        entities: list[Entity] = []
        seen: set[int] = set()
        while not self._at_keyword("ENDSEC"):
            entity = self._parse_entity()
            if entity.id in seen:
                raise DuplicateId(entity.id)
            seen.add(entity.id)
            entities.append(entity)
        self._next()
        self._expect(tk.SEMI)

        self._expect_keyword("END-ISO-10303-21")
        trailing = self._peek()
        if trailing is not None:
            raise StepSyntaxError(trailing[1], "content after end of file marker")

        return StepFile(
            header=tuple(header),
            entities=tuple(entities),
            line_count=count_content_lines(self.text),
        )

    def _parse_header_record(self) -> HeaderRecord:
        kw = self._expect(tk.KEYWORD)
        args = self._parse_paren_args()
        self._expect(tk.SEMI)
        return HeaderRecord(self._lexeme(kw), args)

    def _parse_entity(self) -> Entity:
        ref = self._expect(tk.REF)
        start = ref[1]
        entity_id = int(self._lexeme(ref)[1:])
        self._expect(tk.EQ)
        tok = self._peek()
        if tok is None:
            raise StepSyntaxError(len(self.text), "unexpected end of input")
        if tok[0] == tk.LPAREN:
            body = self._parse_complex_body()
        else:
            body = self._parse_simple_body()
        end_tok = self._expect(tk.SEMI)
        return Entity(entity_id, body, source_span=(start, end_tok[2]))

    def _parse_simple_body(self) -> Simple:
        kw_tok = self._expect(tk.KEYWORD)
        keyword = self._lexeme(kw_tok)
        if not valid_keyword(keyword):
            raise StepSyntaxError(kw_tok[1], f"invalid entity keyword {keyword!r}")
        return Simple(keyword, self._parse_paren_args())

    def _parse_complex_body(self) -> Complex:
        lparen = self._expect(tk.LPAREN)
        parts = []
        while True:
            tok = self._peek()
            if tok is None:
                raise StepSyntaxError(len(self.text), "unexpected end of input")
            if tok[0] == tk.RPAREN:
                self._next()
                break
            parts.append(self._parse_simple_body())
        if len(parts) < 2:
            raise StepSyntaxError(
                lparen[1], "complex entity must list at least two parts")
        return Complex(tuple(parts))

    def _parse_paren_args(self) -> tuple[Arg, ...]:
        self._expect(tk.LPAREN)
        args: list[Arg] = []
        tok = self._peek()
        if tok is not None and tok[0] == tk.RPAREN:
            self._next()
            return ()
        while True:
            args.append(self._parse_arg())
            tok = self._next()
            if tok[0] == tk.RPAREN:
                return tuple(args)
            if tok[0] != tk.COMMA:
                raise StepSyntaxError(
                    tok[1], f"expected ',' or ')', found {self._lexeme(tok)!r}")

    def _parse_arg(self) -> Arg:
        tok = self._next()
        kind = tok[0]
        lex = self._lexeme(tok)
        if kind == tk.REAL:
            return Real(float(lex), lex)
        if kind == tk.INTEGER:
            return Integer(int(lex), lex)
        if kind == tk.STRING:
            return String(lex[1:-1].replace("''", "'"))
        if kind == tk.ENUM:
            return EnumToken(lex[1:-1])
        if kind == tk.REF:
            return EntityRef(int(lex[1:]))
        if kind == tk.STAR:
            return STAR
        if kind == tk.DOLLAR:
            return DOLLAR
        if kind == tk.BINARY:
            return Binary(lex[1:-1])
        if kind == tk.LPAREN:
            items: list[Arg] = []
            nxt = self._peek()
            if nxt is not None and nxt[0] == tk.RPAREN:
                self._next()
                return ArgList(())
            while True:
                items.append(self._parse_arg())
                sep = self._next()
                if sep[0] == tk.RPAREN:
                    return ArgList(tuple(items))
                if sep[0] != tk.COMMA:
                    raise StepSyntaxError(
                        sep[1], f"expected ',' or ')', found {self._lexeme(sep)!r}")
        if kind == tk.KEYWORD:
            return Typed(lex, self._parse_paren_args())
        raise StepSyntaxError(tok[1], f"unexpected token {lex!r} in argument list")


def resolve_refs(file: StepFile) -> list[tuple[int, int]]:
    """All (referencing id, missing id) pairs; empty means fully resolvable."""
    missing = []
    for entity in file.entities:
        for target in entity.refs():
            if target not in file:
                missing.append((entity.id, target))
    return sorted(set(missing))
