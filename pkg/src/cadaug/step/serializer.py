"""Part 21 writer: the inverse of the parser up to formatting.

Numbers keep their source spelling when one is present, so
parse -> serialize -> parse is structurally lossless.
"""

from __future__ import annotations

from cadaug.step.model import (
    Arg, ArgList, Binary, Complex, Dollar, Entity, EntityRef, EnumToken,
    HeaderRecord, Integer, Real, Simple, Star, StepFile, String, Typed,
)


def format_real(value: float) -> str:
    """A Part 21 real literal: always carries a '.' in the mantissa."""
    text = repr(value)
    if "e" in text or "E" in text:
        mantissa, _, exponent = text.partition("e" if "e" in text else "E")
        if "." not in mantissa:
            mantissa += "."
        return f"{mantissa}E{exponent}"
    if "." not in text:
        text += "."
    return text


def format_arg(arg: Arg) -> str:
    if isinstance(arg, Real):
        return arg.text if arg.text is not None else format_real(arg.value)
    if isinstance(arg, Integer):
        return arg.text if arg.text is not None else str(arg.value)
    if isinstance(arg, String):
        return "'" + arg.value.replace("'", "''") + "'"
    if isinstance(arg, EnumToken):
        return f".{arg.name}."
    if isinstance(arg, EntityRef):
        return f"#{arg.target}"
    if isinstance(arg, Star):
        return "*"
    if isinstance(arg, Dollar):
        return "$"
    if isinstance(arg, ArgList):
        return "(" + ",".join(format_arg(a) for a in arg.items) + ")"
    if isinstance(arg, Typed):
        return arg.keyword + "(" + ",".join(format_arg(a) for a in arg.args) + ")"
    if isinstance(arg, Binary):
        return f'"{arg.text}"'
    raise TypeError(f"not an argument node: {arg!r}")


def _format_simple(body: Simple) -> str:
    return body.keyword + "(" + ",".join(format_arg(a) for a in body.args) + ")"


def format_entity(entity: Entity) -> str:
    if isinstance(entity.body, Complex):
        inner = "".join(_format_simple(part) for part in entity.body.parts)
        return f"#{entity.id}=({inner});"
    return f"#{entity.id}={_format_simple(entity.body)};"


def serialize_step(file: StepFile) -> str:
    """Emit a Part 21 document, one record per line."""
    lines = ["ISO-10303-21;", "HEADER;"]
    for record in file.header:
        lines.append(_format_record(record))
    lines.append("ENDSEC;")
    lines.append("DATA;")
    for entity in file.entities:
        lines.append(format_entity(entity))
    lines.append("ENDSEC;")
    lines.append("END-ISO-10303-21;")
    return "\n".join(lines) + "\n"


def _format_record(record: HeaderRecord) -> str:
    return record.keyword + "(" + ",".join(format_arg(a) for a in record.args) + ");"


def save_step(file: StepFile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_step(file))
