from __future__ import annotations

import random

import pytest

import mutators
import oracles
from cadaug.errors import EmptyModel, UnresolvedGeometry
from cadaug.metrics import (
    EntityKind, classify_entity, compute_stats, edge_basis_curves,
)
from cadaug.step.parser import load_step, parse_step
from cadaug.step.serializer import serialize_step


def _fixture(corpus_dir, name):
    return load_step(corpus_dir / f"{name}.step")


def test_classify_plane_face(corpus_dir):
    f = _fixture(corpus_dir, "cube_unit")
    faces = f.entities_with_keyword("ADVANCED_FACE")
    assert len(faces) == 6
    for face in faces:
        cls = classify_entity(f, face)
        assert cls.kind is EntityKind.FACE
        assert not cls.is_bspline


def test_classify_spline_face_simple_and_complex(corpus_dir):
    for name in ("cube_bspline_top", "cube_bspline_complex"):
        f = _fixture(corpus_dir, name)
        spline_faces = [
            face for face in f.entities_with_keyword("ADVANCED_FACE")
            if classify_entity(f, face).is_bspline]
        assert len(spline_faces) == 1, name


def test_classify_curves(corpus_dir):
    f = _fixture(corpus_dir, "cube_trimmed")
    trimmed = f.entities_with_keyword("TRIMMED_CURVE")
    assert len(trimmed) == 2
    flags = sorted(classify_entity(f, t).is_bspline for t in trimmed)
    assert flags == [False, True]  # one over a line, one over a spline
    for t in trimmed:
        assert classify_entity(f, t).kind is EntityKind.CURVE


def test_classify_other(corpus_dir):
    f = _fixture(corpus_dir, "cube_unit")
    point = f.entities_with_keyword("CARTESIAN_POINT")[0]
    cls = classify_entity(f, point)
    assert cls.kind is EntityKind.OTHER
    assert not cls.is_bspline


def test_unresolved_surface_raises():
    text = (
        "ISO-10303-21;HEADER;ENDSEC;DATA;"
        "#1=ADVANCED_FACE('',(),#99,.T.);"
        "ENDSEC;END-ISO-10303-21;"
    )
    f = parse_step(text)
    with pytest.raises(UnresolvedGeometry):
        classify_entity(f, f.entities[0])


def test_stats_zero_and_full_ratio(corpus_dir):
    zero = compute_stats(_fixture(corpus_dir, "cube_unit"))
    assert (zero.faces, zero.bspline_faces) == (6, 0)
    assert (zero.curves, zero.bspline_curves) == (12, 0)
    assert zero.bspline_ratio == 0.0

    full = compute_stats(_fixture(corpus_dir, "cube_all_bspline"))
    assert full.faces == full.bspline_faces == 6
    assert full.curves == full.bspline_curves == 12
    assert full.bspline_ratio == 1.0


def test_stats_hand_computed_mixed(corpus_dir):
    stats = compute_stats(_fixture(corpus_dir, "metrics_mixed"))
    assert (stats.faces, stats.bspline_faces) == (10, 3)
    assert (stats.curves, stats.bspline_curves) == (20, 5)
    # (3/10 + 5/20) / 2, evaluated by hand
    assert abs(stats.bspline_ratio - 0.275) < 1e-15


def test_distinct_basis_curves_counted_once():
    # two edges sharing one basis line: e == 1
    text = (
        "ISO-10303-21;HEADER;ENDSEC;DATA;"
        "#1=CARTESIAN_POINT('',(0.,0.,0.));"
        "#2=VERTEX_POINT('',#1);"
        "#3=DIRECTION('',(1.,0.,0.));"
        "#4=VECTOR('',#3,1.);"
        "#5=LINE('',#1,#4);"
        "#6=EDGE_CURVE('',#2,#2,#5,.T.);"
        "#7=EDGE_CURVE('',#2,#2,#5,.F.);"
        "ENDSEC;END-ISO-10303-21;"
    )
    f = parse_step(text)
    assert len(edge_basis_curves(f)) == 1
    stats = compute_stats(f)
    assert stats.curves == 1


def test_empty_model_raises():
    text = ("ISO-10303-21;HEADER;ENDSEC;DATA;"
            "#1=CARTESIAN_POINT('',(0.,0.,0.));"
            "ENDSEC;END-ISO-10303-21;")
    with pytest.raises(EmptyModel):
        compute_stats(parse_step(text))


def test_degenerate_denominator_faces_only():
    text = (
        "ISO-10303-21;HEADER;ENDSEC;DATA;"
        "#1=CARTESIAN_POINT('',(0.,0.,0.));"
        "#2=DIRECTION('',(0.,0.,1.));"
        "#3=DIRECTION('',(1.,0.,0.));"
        "#4=AXIS2_PLACEMENT_3D('',#1,#2,#3);"
        "#5=PLANE('',#4);"
        "#6=ADVANCED_FACE('',(),#5,.T.);"
        "ENDSEC;END-ISO-10303-21;"
    )
    stats = compute_stats(parse_step(text))
    assert stats.faces == 1 and stats.curves == 0
    assert stats.bspline_ratio == 0.0


def test_oracle_equivalence_simple_subset(corpus_paths):
    checked = 0
    for path in corpus_paths:
        text = path.read_text(encoding="utf-8")
        if not oracles.applies_to(text):
            continue
        checked += 1
        stats = compute_stats(parse_step(text))
        expected = oracles.scan_stats(text)
        got = {"f": stats.faces, "fb": stats.bspline_faces,
               "e": stats.curves, "eb": stats.bspline_curves,
               "lines": stats.lines}
        assert got == expected, path.name
    assert checked >= 10  # the oracle must actually cover most fixtures


def test_ratio_invariant_under_renumbering(corpus_dir):
    f = _fixture(corpus_dir, "cube_bspline_edges")
    base = compute_stats(f)
    shifted = mutators.renumber(f, 1000)
    again = compute_stats(shifted)
    assert again == base


def test_ratio_invariant_under_reordering(corpus_dir):
    f = _fixture(corpus_dir, "cube_half_bspline")
    entities = list(f.entities)
    random.Random(7).shuffle(entities)
    from cadaug.step.model import StepFile
    shuffled = StepFile(header=f.header, entities=tuple(entities),
                        line_count=f.line_count)
    assert compute_stats(shuffled) == compute_stats(f)


def _delete_face_and_recount(file, want_bspline: bool):
    from dataclasses import replace
    from cadaug.step.model import ArgList, EntityRef, Simple

    target = None
    for face in file.entities_with_keyword("ADVANCED_FACE"):
        if classify_entity(file, face).is_bspline == want_bspline:
            target = face
            break
    if target is None:
        return None
    entities = []
    for entity in file.entities:
        if entity.id == target.id:
            continue
        if "CLOSED_SHELL" in entity.keywords:
            body = entity.body
            args = list(body.args)
            if isinstance(args[1], ArgList):
                args[1] = ArgList(tuple(
                    a for a in args[1].items
                    if not (isinstance(a, EntityRef)
                            and a.target == target.id)))
            entity = replace(entity, body=Simple(body.keyword, tuple(args)))
        entities.append(entity)
    from cadaug.step.model import StepFile
    return StepFile(header=file.header, entities=tuple(entities),
                    line_count=file.line_count)


@pytest.mark.parametrize("name", ["cube_bspline_top", "cube_half_bspline",
                                  "cube_bspline_edges"])
def test_ratio_monotonicity_under_face_deletion(corpus_dir, name):
    f = _fixture(corpus_dir, name)
    base = compute_stats(f).bspline_ratio

    without_plain = _delete_face_and_recount(f, want_bspline=False)
    if without_plain is not None:
        assert compute_stats(without_plain).bspline_ratio >= base

    without_spline = _delete_face_and_recount(f, want_bspline=True)
    if without_spline is not None:
        assert compute_stats(without_spline).bspline_ratio <= base


def test_stats_invariants_over_corpus(corpus_paths):
    for path in corpus_paths:
        s = compute_stats(load_step(path))
        assert 0 <= s.bspline_faces <= s.faces, path.name
        assert 0 <= s.bspline_curves <= s.curves, path.name
        assert 0.0 <= s.bspline_ratio <= 1.0, path.name
        assert s.lines >= 1
        if s.faces > 0 and s.curves > 0:
            is_zero = s.bspline_faces == 0 and s.bspline_curves == 0
            assert (s.bspline_ratio == 0.0) == is_zero, path.name


def test_stats_survive_roundtrip(corpus_paths):
    for path in corpus_paths:
        f = parse_step(path.read_text(encoding="utf-8"))
        again = parse_step(serialize_step(f))
        a, b = compute_stats(f), compute_stats(again)
        assert (a.faces, a.bspline_faces, a.curves, a.bspline_curves) == \
               (b.faces, b.bspline_faces, b.curves, b.bspline_curves)
