#!/usr/bin/env python3
"""Generate the committed STEP fixture corpus.

Fixtures are written by direct text construction, deliberately not via
the package serializer, so they stay an independent oracle for the
parser and the validator. The cube builder tallies edge uses from the
face cycles and asserts every edge is traversed exactly twice, once per
direction, before anything is written.

Run from the repo root:  python scripts/make_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

HEADER = """ISO-10303-21;
HEADER;
FILE_DESCRIPTION(('{name}'),'2;1');
FILE_NAME('{name}','2026-08-09',(''),(''),'','','');
FILE_SCHEMA(('AUTOMOTIVE_DESIGN'));
ENDSEC;
DATA;
"""

FOOTER = """ENDSEC;
END-ISO-10303-21;
"""


def fmt(v: float) -> str:
    if float(v).is_integer():
        return f"{int(v)}."
    return repr(float(v))


class Writer:
    def __init__(self, start_id: int = 1):
        self.lines: list[str] = []
        self.next_id = start_id

    def add(self, body: str) -> int:
        eid = self.next_id
        self.next_id += 1
        self.lines.append(f"#{eid}={body};")
        return eid

    def point(self, x, y, z) -> int:
        return self.add(f"CARTESIAN_POINT('',({fmt(x)},{fmt(y)},{fmt(z)}))")


# vertices of a box: bottom 0..3 counterclockwise, top 4..7 above them
BOX_CORNERS = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
               (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]

# undirected edges, canonical direction (low index -> high index)
BOX_EDGES = [(0, 1), (1, 2), (2, 3), (0, 3),
             (4, 5), (5, 6), (6, 7), (4, 7),
             (0, 4), (1, 5), (2, 6), (3, 7)]

# face vertex cycles, consistently oriented (outward normals)
BOX_FACES = [
    (0, 3, 2, 1),   # bottom
    (4, 5, 6, 7),   # top
    (0, 1, 5, 4),   # front
    (1, 2, 6, 5),   # right
    (2, 3, 7, 6),   # back
    (3, 0, 4, 7),   # left
]

TOP_FACE = 1
TOP_EDGES = (4, 5, 6, 7)          # indexes into BOX_EDGES


def check_box_topology() -> None:
    """Hand tally: every edge used exactly twice, in opposite directions."""
    uses: dict[tuple[int, int], list[bool]] = {}
    for cycle in BOX_FACES:
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            key = (min(a, b), max(a, b))
            uses.setdefault(key, []).append((a, b) == key)
    assert sorted(uses) == sorted(BOX_EDGES), "edge set mismatch"
    for key, senses in uses.items():
        assert len(senses) == 2, f"edge {key} used {len(senses)} times"
        assert senses[0] != senses[1], f"edge {key} senses not opposite"


def box(w: Writer, origin=(0.0, 0.0, 0.0), size=(1.0, 1.0, 1.0),
        bspline_faces=(), complex_faces=(), bspline_edges=(),
        trimmed_edges=(), trimmed_over_bspline=(),
        face_keyword="ADVANCED_FACE") -> None:
    """Emit one closed box solid.

    bspline_faces / complex_faces: face indexes whose surface is written
    as a spline patch (simple or external-mapping form). bspline_edges /
    trimmed_edges / trimmed_over_bspline: edge indexes with spline,
    trimmed-line or trimmed-spline geometry instead of a line.
    """
    ox, oy, oz = origin
    sx, sy, sz = size
    corners = [(ox + cx * sx, oy + cy * sy, oz + cz * sz)
               for cx, cy, cz in BOX_CORNERS]

    pt = [w.point(*c) for c in corners]
    vx = [w.add(f"VERTEX_POINT('',#{p})") for p in pt]

    edge_ids = []
    for index, (a, b) in enumerate(BOX_EDGES):
        (xa, ya, za), (xb, yb, zb) = corners[a], corners[b]
        if index in bspline_edges or index in trimmed_over_bspline:
            mid1 = w.point(xa + (xb - xa) / 3, ya + (yb - ya) / 3,
                           za + (zb - za) / 3)
            mid2 = w.point(xa + 2 * (xb - xa) / 3, ya + 2 * (yb - ya) / 3,
                           za + 2 * (zb - za) / 3)
            curve = w.add(
                f"B_SPLINE_CURVE_WITH_KNOTS('',3,(#{pt[a]},#{mid1},#{mid2},"
                f"#{pt[b]}),.UNSPECIFIED.,.F.,.F.,(4,4),(0.,1.),"
                ".PIECEWISE_BEZIER_KNOTS.)")
            if index in trimmed_over_bspline:
                curve = w.add(
                    f"TRIMMED_CURVE('',#{curve},(PARAMETER_VALUE(0.)),"
                    "(PARAMETER_VALUE(1.)),.T.,.PARAMETER.)")
        else:
            d = w.add(f"DIRECTION('',({fmt(xb - xa)},{fmt(yb - ya)},"
                      f"{fmt(zb - za)}))")
            vec = w.add(f"VECTOR('',#{d},1.)")
            curve = w.add(f"LINE('',#{pt[a]},#{vec})")
            if index in trimmed_edges:
                curve = w.add(
                    f"TRIMMED_CURVE('',#{curve},(PARAMETER_VALUE(0.)),"
                    "(PARAMETER_VALUE(1.)),.T.,.PARAMETER.)")
        edge_ids.append(
            w.add(f"EDGE_CURVE('',#{vx[a]},#{vx[b]},#{curve},.T.)"))

    face_ids = []
    for findex, cycle in enumerate(BOX_FACES):
        if findex in bspline_faces or findex in complex_faces:
            ca, cb, cc, cd = (pt[cycle[0]], pt[cycle[1]],
                              pt[cycle[3]], pt[cycle[2]])
            grid = f"((#{ca},#{cb}),(#{cc},#{cd}))"
            if findex in complex_faces:
                surf = w.add(
                    "(BOUNDED_SURFACE()"
                    f"B_SPLINE_SURFACE(1,1,{grid},.UNSPECIFIED.,.F.,.F.,.F.)"
                    "B_SPLINE_SURFACE_WITH_KNOTS((2,2),(2,2),(0.,1.),(0.,1.),"
                    ".UNSPECIFIED.)"
                    "GEOMETRIC_REPRESENTATION_ITEM()"
                    "RATIONAL_B_SPLINE_SURFACE(((1.,1.),(1.,1.)))"
                    "REPRESENTATION_ITEM('')SURFACE())")
            else:
                surf = w.add(
                    f"B_SPLINE_SURFACE_WITH_KNOTS('',1,1,{grid},"
                    ".UNSPECIFIED.,.F.,.F.,.F.,(2,2),(2,2),(0.,1.),(0.,1.),"
                    ".UNSPECIFIED.)")
        else:
            loc = w.point(*corners[cycle[0]])
            axis = w.add("DIRECTION('',(0.,0.,1.))")
            refd = w.add("DIRECTION('',(1.,0.,0.))")
            place = w.add(f"AXIS2_PLACEMENT_3D('',#{loc},#{axis},#{refd})")
            surf = w.add(f"PLANE('',#{place})")

        oe_ids = []
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            key = (min(a, b), max(a, b))
            edge = edge_ids[BOX_EDGES.index(key)]
            sense = ".T." if (a, b) == key else ".F."
            oe_ids.append(w.add(f"ORIENTED_EDGE('',*,*,#{edge},{sense})"))
        loop = w.add("EDGE_LOOP('',(" + ",".join(f"#{i}" for i in oe_ids) + "))")
        bound = w.add(f"FACE_OUTER_BOUND('',#{loop},.T.)")
        face_ids.append(
            w.add(f"{face_keyword}('',(#{bound}),#{surf},.T.)"))

    shell = w.add("CLOSED_SHELL('',(" +
                  ",".join(f"#{i}" for i in face_ids) + "))")
    w.add(f"MANIFOLD_SOLID_BREP('',#{shell})")


def metrics_mixed(w: Writer) -> None:
    """10 faces (3 spline) and 20 distinct edge curves (5 spline);
    freestanding geometry, for metric arithmetic only."""
    a = w.point(0, 0, 0)
    b = w.point(1, 0, 0)
    va = w.add(f"VERTEX_POINT('',#{a})")
    vb = w.add(f"VERTEX_POINT('',#{b})")
    for i in range(10):
        if i < 3:
            grid = f"((#{a},#{b}),(#{b},#{a}))"
            surf = w.add(
                f"B_SPLINE_SURFACE_WITH_KNOTS('',1,1,{grid},.UNSPECIFIED.,"
                ".F.,.F.,.F.,(2,2),(2,2),(0.,1.),(0.,1.),.UNSPECIFIED.)")
        else:
            axis = w.add("DIRECTION('',(0.,0.,1.))")
            refd = w.add("DIRECTION('',(1.,0.,0.))")
            place = w.add(f"AXIS2_PLACEMENT_3D('',#{a},#{axis},#{refd})")
            surf = w.add(f"PLANE('',#{place})")
        w.add(f"ADVANCED_FACE('',(),#{surf},.T.)")
    for i in range(20):
        if i < 5:
            curve = w.add(
                f"B_SPLINE_CURVE_WITH_KNOTS('',1,(#{a},#{b}),.UNSPECIFIED.,"
                ".F.,.F.,(2,2),(0.,1.),.PIECEWISE_BEZIER_KNOTS.)")
        else:
            d = w.add("DIRECTION('',(1.,0.,0.))")
            vec = w.add(f"VECTOR('',#{d},1.)")
            curve = w.add(f"LINE('',#{a},#{vec})")
        w.add(f"EDGE_CURVE('',#{va},#{vb},#{curve},.T.)")


def render(name: str, w: Writer) -> str:
    return HEADER.format(name=name) + "\n".join(w.lines) + "\n" + FOOTER


def formatted_variant(text: str) -> str:
    """Same graph as a normal file, hostile formatting: comments, blank
    lines, one entity split across lines."""
    lines = text.splitlines()
    out = []
    split_done = False
    for line in lines:
        if line.startswith("#") and "CARTESIAN_POINT" in line and not split_done:
            head, _, tail = line.partition("=")
            out.append(head + " =")
            out.append("  " + tail)
            out.append("")
            split_done = True
        elif line == "DATA;":
            out.append(line)
            out.append("/* fixture with deliberately odd formatting */")
            out.append("")
        else:
            out.append(line)
    return "\n".join(out) + "\n"


def main() -> int:
    check_box_topology()
    corpus = OUT / "corpus"
    bad = OUT / "bad"
    corpus.mkdir(parents=True, exist_ok=True)
    bad.mkdir(parents=True, exist_ok=True)

    fixtures: dict[str, str] = {}

    def build(name: str, start_id: int = 1, **kwargs) -> None:
        w = Writer(start_id)
        box(w, **kwargs)
        fixtures[name] = render(name, w)

    build("cube_unit")
    build("cube_shifted", origin=(10.0, 5.0, 2.0), size=(3.0, 3.0, 3.0))
    build("cube_large", size=(100.0, 100.0, 100.0))
    build("cube_small", size=(0.5, 0.5, 0.5))
    build("cuboid_tall", size=(1.0, 2.0, 4.0))
    build("cube_bspline_top", bspline_faces=(TOP_FACE,))
    build("cube_bspline_complex", complex_faces=(TOP_FACE,))
    build("cube_bspline_edges", bspline_faces=(TOP_FACE,),
          bspline_edges=TOP_EDGES)
    build("cube_all_bspline", bspline_faces=tuple(range(6)),
          bspline_edges=tuple(range(12)))
    build("cube_trimmed", bspline_faces=(TOP_FACE,),
          trimmed_edges=(0,), trimmed_over_bspline=(4,))
    build("cube_face_surface", face_keyword="FACE_SURFACE")
    build("cube_half_bspline", bspline_faces=(0, 1, 2),
          bspline_edges=(0, 1, 2, 3, 4, 5))
    build("cube_mostly_edges", bspline_faces=(TOP_FACE,),
          bspline_edges=(0, 1, 2, 3, 4, 5, 6, 7))
    build("cube_renumbered", start_id=501)

    w = Writer()
    box(w)
    box(w, origin=(5.0, 0.0, 0.0))
    fixtures["two_cubes"] = render("two_cubes", w)

    w = Writer()
    metrics_mixed(w)
    fixtures["metrics_mixed"] = render("metrics_mixed", w)

    fixtures["cube_formatted"] = formatted_variant(
        fixtures["cube_unit"].replace("cube_unit", "cube_formatted"))

    for name, text in fixtures.items():
        (corpus / f"{name}.step").write_text(text, encoding="utf-8")

    # unparseable / degenerate inputs, kept apart from the corpus
    (bad / "truncated.step").write_text(
        fixtures["cube_unit"][: len(fixtures["cube_unit"]) // 2],
        encoding="utf-8")
    (bad / "no_data.step").write_text(
        "ISO-10303-21;\nHEADER;\nFILE_NAME('x','',(''),(''),'','','');\n"
        "ENDSEC;\nEND-ISO-10303-21;\n", encoding="utf-8")
    (bad / "dup_id.step").write_text(
        "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n"
        "#1=CARTESIAN_POINT('',(0.,0.,0.));\n"
        "#1=CARTESIAN_POINT('',(1.,0.,0.));\n"
        "ENDSEC;\nEND-ISO-10303-21;\n", encoding="utf-8")
    (bad / "not_step.step").write_text(
        "this is not a STEP file\n", encoding="utf-8")
    dangling = Writer()
    surf = dangling.add("PLANE('',#9999)")
    dangling.add(f"ADVANCED_FACE('',(),#{surf},.T.)")
    pa = dangling.point(0, 0, 0)
    vv = dangling.add(f"VERTEX_POINT('',#{pa})")
    dangling.add(f"EDGE_CURVE('',#{vv},#{vv},#8888,.T.)")
    (bad / "dangling.step").write_text(
        render("dangling", dangling), encoding="utf-8")

    print(f"wrote {len(fixtures)} corpus fixtures to {corpus}")
    print(f"wrote 5 bad fixtures to {bad}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
