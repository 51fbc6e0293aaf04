"""Data model for parsed Part 21 files.

Everything here is an immutable value; parsed files are safe to share
across threads. Equality between two ``StepFile`` values is structural:
ids, keywords and argument trees, ignoring source offsets and the exact
spelling of numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

_KEYWORD_RE = re.compile(r"[A-Z_][A-Z0-9_]*\Z")


# --- argument tree nodes ----------------------------------------------------

@dataclass(frozen=True)
class Real:
    value: float
    # exact source spelling, kept so serialization is byte-faithful
    text: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Integer:
    value: int
    text: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class String:
    value: str  # quote-escapes decoded; content otherwise opaque


@dataclass(frozen=True)
class EnumToken:
    name: str  # without the surrounding dots


@dataclass(frozen=True)
class EntityRef:
    target: int


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class Dollar:
    pass


@dataclass(frozen=True)
class ArgList:
    items: tuple["Arg", ...]


@dataclass(frozen=True)
class Typed:
    """Keyword-tagged parameter, e.g. PARAMETER_VALUE(0.5)."""
    keyword: str
    args: tuple["Arg", ...]


@dataclass(frozen=True)
class Binary:
    text: str  # hex payload without the quotes


Arg = Union[Real, Integer, String, EnumToken, EntityRef, Star, Dollar,
            ArgList, Typed, Binary]

STAR = Star()
DOLLAR = Dollar()


def iter_refs(arg: Arg) -> Iterator[int]:
    """Yield every entity id referenced anywhere under `arg`."""
    stack = [arg]
    while stack:
        node = stack.pop()
        if isinstance(node, EntityRef):
            yield node.target
        elif isinstance(node, ArgList):
            stack.extend(node.items)
        elif isinstance(node, Typed):
            stack.extend(node.args)


# --- entities ---------------------------------------------------------------

@dataclass(frozen=True)
class Simple:
    keyword: str
    args: tuple[Arg, ...]


@dataclass(frozen=True)
class Complex:
    """External-mapping instance: an ordered list of (keyword, args) parts."""
    parts: tuple[Simple, ...]


@dataclass(frozen=True)
class Entity:
    id: int
    body: Simple | Complex
    source_span: tuple[int, int] = field(default=(0, 0), compare=False)

    @property
    def is_complex(self) -> bool:
        return isinstance(self.body, Complex)

    @property
    def keywords(self) -> tuple[str, ...]:
        if isinstance(self.body, Simple):
            return (self.body.keyword,)
        return tuple(part.keyword for part in self.body.parts)

    def part(self, keyword: str) -> Simple | None:
        """The Simple body (or complex part) carrying `keyword`, if any."""
        if isinstance(self.body, Simple):
            return self.body if self.body.keyword == keyword else None
        for part in self.body.parts:
            if part.keyword == keyword:
                return part
        return None

    def refs(self) -> Iterator[int]:
        parts = (self.body,) if isinstance(self.body, Simple) else self.body.parts
        for part in parts:
            for arg in part.args:
                yield from iter_refs(arg)


@dataclass(frozen=True)
class HeaderRecord:
    keyword: str
    args: tuple[Arg, ...]


@dataclass(frozen=True)
class StepFile:
    header: tuple[HeaderRecord, ...]
    entities: tuple[Entity, ...]
    line_count: int = field(compare=False, default=0)

    def __post_init__(self):
        object.__setattr__(
            self, "_by_id", {e.id: e for e in self.entities})

    def get(self, entity_id: int) -> Entity | None:
        return self._by_id.get(entity_id)

    def __contains__(self, entity_id: int) -> bool:
        return entity_id in self._by_id

    def entities_with_keyword(self, keyword: str) -> list[Entity]:
        return [e for e in self.entities if keyword in e.keywords]


def valid_keyword(keyword: str) -> bool:
    return bool(_KEYWORD_RE.match(keyword))
