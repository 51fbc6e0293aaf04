"""Minimal stand-in for the CadQuery surface API.

Covers exactly what reference-surface scripts use: ``Vector``,
``Face.makeSplineApprox`` over a rectilinear control net, ``thicken``,
``translate`` and ``exporters.export`` to STEP or STL. Surface fitting
is a clamped cubic tensor-product spline (least-squares on a subsampled
grid); thickening offsets along +z, which is a fair approximation for
the shallow height fields these scripts produce.

This module is not CadQuery. It exists so that environments without a
CAD kernel can still execute and export the reference scripts; real
CadQuery always wins when installed.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import RectBivariateSpline

__shim__ = True

_MAX_FIT = 25  # fit at most this many samples per axis


class Vector:
    __slots__ = ("x", "y", "z")

    def __init__(self, x=0.0, y=0.0, z=0.0):
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    def toTuple(self):
        return (self.x, self.y, self.z)

    def __repr__(self):
        return f"Vector({self.x}, {self.y}, {self.z})"


def _as_xyz(p):
    if isinstance(p, Vector):
        return (p.x, p.y, p.z)
    x, y, z = p
    return (float(x), float(y), float(z))


class _Patch:
    """Clamped tensor-product B-spline z(x, y) plus its 3D control net."""

    def __init__(self, spline, degree_x: int, degree_y: int):
        self.spline = spline
        self.degree_x = degree_x
        self.degree_y = degree_y
        tx, ty = spline.get_knots()
        self.knots_x = np.asarray(tx)
        self.knots_y = np.asarray(ty)
        ncx = len(self.knots_x) - degree_x - 1
        ncy = len(self.knots_y) - degree_y - 1
        self.coef = np.asarray(spline.get_coeffs()).reshape(ncx, ncy)
        # Greville abscissae: with these as x/y control values the spline
        # reproduces x and y exactly (linear precision)
        self.greville_x = np.array([
            self.knots_x[i + 1:i + degree_x + 1].mean() for i in range(ncx)])
        self.greville_y = np.array([
            self.knots_y[j + 1:j + degree_y + 1].mean() for j in range(ncy)])

    def control_points(self, shift=(0.0, 0.0, 0.0)) -> np.ndarray:
        dx, dy, dz = shift
        gx, gy = np.meshgrid(self.greville_x, self.greville_y, indexing="ij")
        return np.stack([gx + dx, gy + dy, self.coef + dz], axis=-1)

    def sample(self, n: int, shift=(0.0, 0.0, 0.0)) -> np.ndarray:
        dx, dy, dz = shift
        xs = np.linspace(self.knots_x[0], self.knots_x[-1], n)
        ys = np.linspace(self.knots_y[0], self.knots_y[-1], n)
        zs = self.spline(xs, ys)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx + dx, gy + dy, zs + dz], axis=-1)


def _fit_patch(net) -> _Patch:
    rows = [[_as_xyz(p) for p in row] for row in net]
    nu, nv = len(rows), len(rows[0])
    if nu < 2 or nv < 2:
        raise ValueError("control net needs at least 2x2 points")
    xs = np.array([rows[i][0][0] for i in range(nu)])
    ys = np.array([rows[0][j][1] for j in range(nv)])
    z = np.array([[rows[i][j][2] for j in range(nv)] for i in range(nu)])

    ix = np.unique(np.linspace(0, nu - 1, min(nu, _MAX_FIT)).round()
                   .astype(int))
    iy = np.unique(np.linspace(0, nv - 1, min(nv, _MAX_FIT)).round()
                   .astype(int))
    kx = min(3, len(ix) - 1)
    ky = min(3, len(iy) - 1)
    spline = RectBivariateSpline(xs[ix], ys[iy], z[np.ix_(ix, iy)],
                                 kx=kx, ky=ky, s=0)
    return _Patch(spline, kx, ky)


class Shape:
    def __init__(self, patch: _Patch, shift=(0.0, 0.0, 0.0)):
        self.patch = patch
        self.shift = tuple(float(c) for c in shift)

    def translate(self, offset):
        dx, dy, dz = _as_xyz(offset) if not isinstance(offset, tuple) \
            else tuple(float(c) for c in offset)
        sx, sy, sz = self.shift
        return type(self)._translated(self, (sx + dx, sy + dy, sz + dz))


class Face(Shape):
    @classmethod
    def makeSplineApprox(cls, points, tol=1e-2, smoothing=None,
                         minDeg=1, maxDeg=3):
        return cls(_fit_patch(points))

    @classmethod
    def _translated(cls, face: "Face", shift):
        return cls(face.patch, shift)

    def thicken(self, thickness: float) -> "Solid":
        return Solid(self.patch, float(thickness), self.shift)


class Solid(Shape):
    def __init__(self, patch: _Patch, thickness: float,
                 shift=(0.0, 0.0, 0.0)):
        super().__init__(patch, shift)
        self.thickness = float(thickness)

    @classmethod
    def _translated(cls, solid: "Solid", shift):
        return cls(solid.patch, solid.thickness, shift)


class exporters:
    @staticmethod
    def export(shape: Shape, path: str, exportType: str | None = None):
        kind = (exportType or "").upper()
        if not kind:
            lowered = str(path).lower()
            if lowered.endswith((".step", ".stp")):
                kind = "STEP"
            elif lowered.endswith(".stl"):
                kind = "STL"
            else:
                raise ValueError(f"cannot infer export type for {path!r}")
        if kind == "STEP":
            text = _step_document(shape)
        elif kind == "STL":
            text = _stl_document(shape)
        else:
            raise ValueError(f"unsupported export type {kind!r}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# --- STEP writing -----------------------------------------------------------

def _fmt(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError("non-finite coordinate")
    if float(v).is_integer():
        return f"{int(v)}."
    text = repr(float(v))
    if "e" in text:
        mantissa, _, exponent = text.partition("e")
        if "." not in mantissa:
            mantissa += "."
        return f"{mantissa}E{exponent}"
    return text


class _StepWriter:
    def __init__(self):
        self.lines: list[str] = []
        self.next_id = 1

    def add(self, body: str) -> int:
        eid = self.next_id
        self.next_id += 1
        self.lines.append(f"#{eid}={body};")
        return eid

    def point(self, xyz) -> int:
        x, y, z = xyz
        return self.add(f"CARTESIAN_POINT('',({_fmt(x)},{_fmt(y)},{_fmt(z)}))")

    def document(self, name: str) -> str:
        header = (
            "ISO-10303-21;\n"
            "HEADER;\n"
            f"FILE_DESCRIPTION(('{name}'),'2;1');\n"
            f"FILE_NAME('{name}','',(''),(''),'shim kernel','','');\n"
            "FILE_SCHEMA(('AUTOMOTIVE_DESIGN'));\n"
            "ENDSEC;\n"
            "DATA;\n"
        )
        return header + "\n".join(self.lines) + "\nENDSEC;\nEND-ISO-10303-21;\n"


def _knot_groups(knots: np.ndarray) -> tuple[list[float], list[int]]:
    values: list[float] = []
    mults: list[int] = []
    for k in knots:
        if values and k == values[-1]:
            mults[-1] += 1
        else:
            values.append(float(k))
            mults.append(1)
    return values, mults


def _ints(items) -> str:
    return "(" + ",".join(str(int(i)) for i in items) + ")"


def _reals(items) -> str:
    return "(" + ",".join(_fmt(v) for v in items) + ")"


def _surface_entity(w: _StepWriter, patch: _Patch, shift) -> int:
    cps = patch.control_points(shift)
    grid_ids = [[w.point(cps[i, j]) for j in range(cps.shape[1])]
                for i in range(cps.shape[0])]
    grid = "(" + ",".join(
        "(" + ",".join(f"#{pid}" for pid in row) + ")" for row in grid_ids
    ) + ")"
    ux, mx = _knot_groups(patch.knots_x)
    uy, my = _knot_groups(patch.knots_y)
    return w.add(
        f"B_SPLINE_SURFACE_WITH_KNOTS('',{patch.degree_x},{patch.degree_y},"
        f"{grid},.UNSPECIFIED.,.F.,.F.,.F.,{_ints(mx)},{_ints(my)},"
        f"{_reals(ux)},{_reals(uy)},.UNSPECIFIED.)")


def _ruled_side_entity(w: _StepWriter, bottom: np.ndarray, top: np.ndarray,
                       knots: np.ndarray, degree: int) -> int:
    """Degree (k, 1) surface between two parallel boundary curves."""
    rows = []
    for b, t in zip(bottom, top):
        rows.append(f"(#{w.point(b)},#{w.point(t)})")
    grid = "(" + ",".join(rows) + ")"
    uv, mv = _knot_groups(knots)
    return w.add(
        f"B_SPLINE_SURFACE_WITH_KNOTS('',{degree},1,{grid},.UNSPECIFIED.,"
        f".F.,.F.,.F.,{_ints(mv)},(2,2),{_reals(uv)},(0.,1.),.UNSPECIFIED.)")


def _curve_entity(w: _StepWriter, points: np.ndarray, knots: np.ndarray,
                  degree: int) -> int:
    refs = ",".join(f"#{w.point(p)}" for p in points)
    values, mults = _knot_groups(knots)
    return w.add(
        f"B_SPLINE_CURVE_WITH_KNOTS('',{degree},({refs}),.UNSPECIFIED.,"
        f".F.,.F.,{_ints(mults)},{_reals(values)},.UNSPECIFIED.)")


def _line_entity(w: _StepWriter, a, b) -> int:
    ax, ay, az = a
    bx, by, bz = b
    pa = w.point(a)
    d = w.add(f"DIRECTION('',({_fmt(bx - ax)},{_fmt(by - ay)},"
              f"{_fmt(bz - az)}))")
    vec = w.add(f"VECTOR('',#{d},1.)")
    return w.add(f"LINE('',#{pa},#{vec})")


def _face_entity(w: _StepWriter, surface: int,
                 loop_edges: list[tuple[int, bool]]) -> int:
    oe_ids = [w.add(f"ORIENTED_EDGE('',*,*,#{edge},{'.T.' if fwd else '.F.'})")
              for edge, fwd in loop_edges]
    loop = w.add("EDGE_LOOP('',(" + ",".join(f"#{i}" for i in oe_ids) + "))")
    bound = w.add(f"FACE_OUTER_BOUND('',#{loop},.T.)")
    return w.add(f"ADVANCED_FACE('',(#{bound}),#{surface},.T.)")


def _boundaries(patch: _Patch, shift):
    """Control polygons of the four patch boundary curves.

    Returns (south, east, north, west) as (points, knots, degree), where
    south/north run along x (j fixed) and west/east along y (i fixed).
    """
    cps = patch.control_points(shift)
    return {
        "south": (cps[:, 0, :], patch.knots_x, patch.degree_x),
        "north": (cps[:, -1, :], patch.knots_x, patch.degree_x),
        "west": (cps[0, :, :], patch.knots_y, patch.degree_y),
        "east": (cps[-1, :, :], patch.knots_y, patch.degree_y),
    }


def _face_document(shape: Face) -> str:
    w = _StepWriter()
    b = _boundaries(shape.patch, shape.shift)
    corners = {
        "sw": b["south"][0][0], "se": b["south"][0][-1],
        "nw": b["north"][0][0], "ne": b["north"][0][-1],
    }
    vx = {k: w.add(f"VERTEX_POINT('',#{w.point(p)})")
          for k, p in corners.items()}

    # each edge runs in its curve's natural direction
    edge_of = {}
    for name, (va, vb) in {"south": ("sw", "se"), "north": ("nw", "ne"),
                           "west": ("sw", "nw"), "east": ("se", "ne")}.items():
        points, knots, degree = b[name]
        curve = _curve_entity(w, points, knots, degree)
        edge_of[name] = w.add(
            f"EDGE_CURVE('',#{vx[va]},#{vx[vb]},#{curve},.T.)")

    surface = _surface_entity(w, shape.patch, shape.shift)
    _face_entity(w, surface, [
        (edge_of["south"], True), (edge_of["east"], True),
        (edge_of["north"], False), (edge_of["west"], False),
    ])
    return w.document("spline_face")


# box-style combinatorics for the thickened patch: bottom ring 0..3,
# top ring 4..7, with the same face cycles as a hexahedron
_SOLID_FACES = [
    ("bottom", (0, 3, 2, 1)),
    ("top", (4, 5, 6, 7)),
    ("front", (0, 1, 5, 4)),
    ("east_side", (1, 2, 6, 5)),
    ("back", (2, 3, 7, 6)),
    ("west_side", (3, 0, 4, 7)),
]


def _solid_document(shape: Solid) -> str:
    w = _StepWriter()
    patch = shape.patch
    t = shape.thickness
    bot = shape.shift
    top = (shape.shift[0], shape.shift[1], shape.shift[2] + t)

    bnd_b = _boundaries(patch, bot)
    bnd_t = _boundaries(patch, top)

    # ring vertex order: sw, se, ne, nw (bottom 0..3, top 4..7)
    ring = ["sw", "se", "ne", "nw"]
    corner = {"sw": ("south", 0), "se": ("south", -1),
              "ne": ("north", -1), "nw": ("north", 0)}
    positions = []
    for level in (bnd_b, bnd_t):
        for key in ring:
            name, index = corner[key]
            positions.append(level[name][0][index])
    vx = [w.add(f"VERTEX_POINT('',#{w.point(p)})") for p in positions]

    # directed edges: (vertex a, vertex b, curve builder)
    def spline_edge(level, name, va, vb):
        points, knots, degree = level[name]
        curve = _curve_entity(w, points, knots, degree)
        return (va, vb, w.add(
            f"EDGE_CURVE('',#{vx[va]},#{vx[vb]},#{curve},.T.)"))

    edges = {}
    for base, level in ((0, bnd_b), (4, bnd_t)):
        edges[(base + 0, base + 1)] = spline_edge(level, "south",
                                                  base + 0, base + 1)[2]
        edges[(base + 1, base + 2)] = spline_edge(level, "east",
                                                  base + 1, base + 2)[2]
        edges[(base + 3, base + 2)] = spline_edge(level, "north",
                                                  base + 3, base + 2)[2]
        edges[(base + 0, base + 3)] = spline_edge(level, "west",
                                                  base + 0, base + 3)[2]
    for k in range(4):
        line = _line_entity(w, positions[k], positions[k + 4])
        edges[(k, k + 4)] = w.add(
            f"EDGE_CURVE('',#{vx[k]},#{vx[k + 4]},#{line},.T.)")

    def surface_for(name):
        if name == "bottom":
            return _surface_entity(w, patch, bot)
        if name == "top":
            return _surface_entity(w, patch, top)
        side = {"front": "south", "back": "north",
                "east_side": "east", "west_side": "west"}[name]
        points_b, knots, degree = bnd_b[side]
        points_t = bnd_t[side][0]
        return _ruled_side_entity(w, points_b, points_t, knots, degree)

    face_ids = []
    for name, cycle in _SOLID_FACES:
        loop = []
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            if (a, b) in edges:
                loop.append((edges[(a, b)], True))
            else:
                loop.append((edges[(b, a)], False))
        face_ids.append(_face_entity(w, surface_for(name), loop))

    shell = w.add("CLOSED_SHELL('',(" +
                  ",".join(f"#{i}" for i in face_ids) + "))")
    w.add(f"MANIFOLD_SOLID_BREP('',#{shell})")
    return w.document("spline_solid")


def _step_document(shape: Shape) -> str:
    if isinstance(shape, Solid):
        return _solid_document(shape)
    if isinstance(shape, Face):
        return _face_document(shape)
    raise TypeError(f"cannot export {type(shape).__name__} to STEP")


# --- STL writing --------------------------------------------------------------

def _stl_facet(out: list[str], a, b, c) -> None:
    out.append("  facet normal 0 0 0")
    out.append("    outer loop")
    for p in (a, b, c):
        out.append(f"      vertex {p[0]:.6e} {p[1]:.6e} {p[2]:.6e}")
    out.append("    endloop")
    out.append("  endfacet")


def _grid_facets(out: list[str], grid: np.ndarray, flip=False) -> None:
    n, m = grid.shape[:2]
    for i in range(n - 1):
        for j in range(m - 1):
            q = [grid[i, j], grid[i + 1, j], grid[i + 1, j + 1],
                 grid[i, j + 1]]
            if flip:
                q.reverse()
            _stl_facet(out, q[0], q[1], q[2])
            _stl_facet(out, q[0], q[2], q[3])


def _stl_document(shape: Shape, samples: int = 40) -> str:
    out = [f"solid shim"]
    if isinstance(shape, Solid):
        top_shift = (shape.shift[0], shape.shift[1],
                     shape.shift[2] + shape.thickness)
        top = shape.patch.sample(samples, top_shift)
        bottom = shape.patch.sample(samples, shape.shift)
        _grid_facets(out, top)
        _grid_facets(out, bottom, flip=True)
        for edge_top, edge_bottom in (
            (top[:, 0], bottom[:, 0]), (top[:, -1], bottom[:, -1]),
            (top[0, :], bottom[0, :]), (top[-1, :], bottom[-1, :]),
        ):
            strip = np.stack([edge_bottom, edge_top], axis=1)
            _grid_facets(out, strip)
    else:
        _grid_facets(out, shape.patch.sample(samples, shape.shift))
    out.append("endsolid shim")
    return "\n".join(out) + "\n"
