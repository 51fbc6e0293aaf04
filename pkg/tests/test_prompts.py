from __future__ import annotations

import pytest

from cadaug.errors import EmptyDescription, MissingReference
from cadaug.prompts import (
    BRACKET, MODE_FULL, MODE_MINUS_R, MODE_MINUS_RT, REPAIR_PREAMBLE,
    category_from_mapping, compose, repair_prompt, truncate_tail,
)

DESCRIPTION = "A rectangular bracket with two holes and two slots."
SCRIPT = "import cadquery as cq, math\nU, V, SPAN, H = 100, 100, 100, 7\n"


def test_full_mode_layout():
    bundle = compose(MODE_FULL, BRACKET, DESCRIPTION, SCRIPT)
    r = bundle.rendered
    assert r.startswith("Use Python CadQuery library to write a CAD program "
                        "of a bracket that is described as follows.")
    assert DESCRIPTION in r
    assert "should conform to the curvature of the reference surface" in r
    assert "watertight solid" in r
    assert SCRIPT in r
    # strict part ordering by byte offset
    offsets = [r.index(bundle.prefix), r.index(bundle.description),
               r.index(bundle.context), r.index(bundle.postfix),
               r.index(bundle.reference_script)]
    assert offsets == sorted(offsets)
    # newline-separated concatenation, nothing else
    assert r == "\n".join([bundle.prefix, bundle.description, bundle.context,
                           bundle.postfix, bundle.reference_script])


def test_minus_rt_drops_context_and_script():
    bundle = compose(MODE_MINUS_RT, BRACKET, DESCRIPTION, SCRIPT)
    assert bundle.context == ""
    assert bundle.reference_script is None
    assert bundle.rendered == "\n".join(
        [bundle.prefix, DESCRIPTION, bundle.postfix])
    assert "reference surface" not in bundle.rendered
    assert SCRIPT not in bundle.rendered


def test_minus_r_swaps_context_keeps_no_script():
    bundle = compose(MODE_MINUS_R, BRACKET, DESCRIPTION, SCRIPT)
    assert bundle.context == "The shapes of the bracket look smooth and organic."
    assert "look smooth and organic" in bundle.rendered
    assert SCRIPT not in bundle.rendered
    assert bundle.reference_script is None


def test_category_noun_parameterization():
    wheel = category_from_mapping({"name": "wheel", "noun": "car wheel"})
    bundle = compose(MODE_MINUS_R, wheel, "A five-spoke wheel.")
    assert "CAD program of a car wheel" in bundle.prefix
    assert bundle.context == "The shapes of the car wheel look smooth and organic."


def test_full_requires_script():
    with pytest.raises(MissingReference):
        compose(MODE_FULL, BRACKET, DESCRIPTION)


def test_description_must_be_nonempty():
    with pytest.raises(EmptyDescription):
        compose(MODE_MINUS_RT, BRACKET, "   ")


def test_unknown_mode():
    with pytest.raises(ValueError):
        compose("bogus", BRACKET, DESCRIPTION)


def test_compose_deterministic():
    a = compose(MODE_FULL, BRACKET, DESCRIPTION, SCRIPT)
    b = compose(MODE_FULL, BRACKET, DESCRIPTION, SCRIPT)
    assert a == b


def test_repair_appends_program_and_short_error():
    bundle = compose(MODE_FULL, BRACKET, DESCRIPTION, SCRIPT)
    error = "Traceback:\n  line 1\nValueError: boom"
    repaired = repair_prompt(bundle, "print('x')", error)
    r = repaired.rendered
    assert r.startswith(bundle.rendered)
    assert REPAIR_PREAMBLE in r
    assert "print('x')" in r
    for line in error.splitlines():
        assert line in r
    # base parts untouched
    assert (repaired.prefix, repaired.description, repaired.context,
            repaired.postfix) == (bundle.prefix, bundle.description,
                                  bundle.context, bundle.postfix)


def test_repair_truncates_error_tail():
    bundle = compose(MODE_MINUS_RT, BRACKET, DESCRIPTION)
    long_error = "\n".join(f"frame {i}" for i in range(10000))
    repaired = repair_prompt(bundle, "p", long_error, budget=4096)
    tail = long_error.encode()[-4096:].decode()
    assert tail in repaired.rendered
    assert "frame 0\n" not in repaired.rendered
    assert len(repaired.rendered) <= len(bundle.rendered) + 4096 + \
        len(REPAIR_PREAMBLE) + len("p") + 3


def test_truncate_tail_utf8_safe():
    text = "é" * 100
    out = truncate_tail(text, 7)
    assert out and len(out.encode()) <= 7
    assert set(out) == {"é"}


def test_repeated_repairs_grow_bounded():
    bundle = compose(MODE_MINUS_RT, BRACKET, DESCRIPTION)
    base_len = len(bundle.rendered)
    budget = 256
    current = bundle
    for i in range(8):
        current = repair_prompt(current, "prog", "x" * 10000, budget=budget)
    overhead_per_iter = budget + len(REPAIR_PREAMBLE) + len("prog") + 3
    assert len(current.rendered) <= base_len + 8 * overhead_per_iter


def test_repair_includes_validation_failures():
    from cadaug.topology import CheckFailure, ValidationReport, format_report
    report = ValidationReport("fail", (
        CheckFailure("edge-manifold", (7, 9), "edges not used exactly twice"),
        CheckFailure("orientation", (4,), "same direction twice"),
    ))
    bundle = compose(MODE_MINUS_RT, BRACKET, DESCRIPTION)
    repaired = repair_prompt(bundle, "prog", format_report(report))
    assert "edge-manifold" in repaired.rendered
    assert "edges not used exactly twice" in repaired.rendered
    assert "orientation" in repaired.rendered
    assert "same direction twice" in repaired.rendered
