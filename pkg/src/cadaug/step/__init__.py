"""ISO 10303-21 (STEP / "Part 21") parsing and serialization."""

from cadaug.step.model import (
    Arg, ArgList, Binary, Complex, Dollar, DOLLAR, Entity, EntityRef,
    EnumToken, HeaderRecord, Integer, Real, Simple, Star, STAR, StepFile,
    String, Typed, iter_refs,
)
from cadaug.step.parser import (
    count_content_lines, load_step, parse_step, resolve_refs,
)
from cadaug.step.scan import IMPLEMENTATION as SCANNER_IMPLEMENTATION
from cadaug.step.serializer import (
    format_entity, format_real, save_step, serialize_step,
)

__all__ = [
    "Arg", "ArgList", "Binary", "Complex", "Dollar", "DOLLAR", "Entity",
    "EntityRef", "EnumToken", "HeaderRecord", "Integer", "Real", "Simple",
    "Star", "STAR", "StepFile", "String", "Typed", "iter_refs",
    "count_content_lines", "load_step", "parse_step", "resolve_refs",
    "SCANNER_IMPLEMENTATION", "format_entity", "format_real", "save_step",
    "serialize_step",
]
