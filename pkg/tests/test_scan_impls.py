"""The compiled and pure-Python scanners must be interchangeable."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadaug.errors import StepSyntaxError
from cadaug.step import _scan_py

compiled = pytest.importorskip(
    "cadaug.step._scan_c", reason="compiled scanner not built")


def test_identical_tokens_on_corpus(corpus_paths):
    for path in corpus_paths:
        text = path.read_text(encoding="utf-8")
        assert compiled.scan(text) == _scan_py.scan(text), path.name


SNIPPETS = [
    "",
    "ISO-10303-21;",
    "#1=A(1,2.,3.E-5,-4,+5.5,'x''y',.T.,#2,*,$,\"0FF\");",
    "/* comment */ KEYWORD()",
    "A(1)/*multi\nline*/B(2)",
    "END-ISO-10303-21;",
    "#10 = B_SPLINE_CURVE_WITH_KNOTS ( '' , 3 )",
    "'unclosed",
    "'''",
    "'''x",
    "''''",
    "'' '",
    "/* unclosed",
    "1.2.3",
    "@",
    "#x",
    '"GG"',
    ".5",
    "5.E2 5E2 5. .E.",
]


@pytest.mark.parametrize("snippet", SNIPPETS)
def test_identical_behaviour_on_edge_cases(snippet):
    try:
        expected = _scan_py.scan(snippet)
        failed = None
    except StepSyntaxError as exc:
        expected, failed = None, exc.position
    if failed is None:
        assert compiled.scan(snippet) == expected
    else:
        with pytest.raises(StepSyntaxError) as err:
            compiled.scan(snippet)
        assert err.value.position == failed


@given(st.text(
    alphabet=st.sampled_from(list("#=();,.*$'\"ABZ_019+-eE \n/")),
    max_size=60))
@settings(max_examples=500, deadline=None)
def test_fuzzed_equivalence(text):
    try:
        expected = _scan_py.scan(text)
    except StepSyntaxError as exc:
        with pytest.raises(StepSyntaxError) as err:
            compiled.scan(text)
        assert err.value.position == exc.position
        return
    assert compiled.scan(text) == expected
