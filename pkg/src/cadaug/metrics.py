"""Per-object geometry metrics over a parsed STEP file.

Counts faces and curves, how many of each are spline-based, and folds
them into a single organic-shape ratio in [0, 1]: the mean of the spline
fraction of faces and the spline fraction of curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from cadaug.errors import EmptyModel, UnresolvedGeometry
from cadaug.step.model import Entity, EntityRef, Simple, StepFile

FACE_KEYWORDS = frozenset({"ADVANCED_FACE", "FACE_SURFACE"})

# Basis-curve geometry spellings; topology wrappers (ORIENTED_EDGE,
# EDGE_CURVE) are deliberately absent; they would double-count.
CURVE_KEYWORDS = frozenset({
    "LINE", "CIRCLE", "ELLIPSE", "HYPERBOLA", "PARABOLA",
    "B_SPLINE_CURVE", "B_SPLINE_CURVE_WITH_KNOTS", "RATIONAL_B_SPLINE_CURVE",
    "BEZIER_CURVE", "QUASI_UNIFORM_CURVE", "UNIFORM_CURVE",
    "TRIMMED_CURVE", "POLYLINE",
})

# Bezier / (quasi-)uniform forms are spline subtypes.
BSPLINE_SURFACE_KEYWORDS = frozenset({
    "B_SPLINE_SURFACE", "B_SPLINE_SURFACE_WITH_KNOTS",
    "RATIONAL_B_SPLINE_SURFACE", "BEZIER_SURFACE",
    "QUASI_UNIFORM_SURFACE", "UNIFORM_SURFACE",
})

BSPLINE_CURVE_KEYWORDS = frozenset({
    "B_SPLINE_CURVE", "B_SPLINE_CURVE_WITH_KNOTS",
    "RATIONAL_B_SPLINE_CURVE", "BEZIER_CURVE",
    "QUASI_UNIFORM_CURVE", "UNIFORM_CURVE",
})


class EntityKind(Enum):
    FACE = "face"
    CURVE = "curve"
    OTHER = "other"


@dataclass(frozen=True)
class EntityClass:
    kind: EntityKind
    is_bspline: bool


@dataclass(frozen=True)
class BRepStats:
    faces: int
    bspline_faces: int
    curves: int
    bspline_curves: int
    lines: int
    bspline_ratio: float


def _face_part(entity: Entity) -> Simple | None:
    for kw in FACE_KEYWORDS:
        part = entity.part(kw)
        if part is not None:
            return part
    return None


def face_surface(file: StepFile, entity: Entity) -> Entity:
    """Resolve a face's underlying surface entity.

    Face layout is (name, bounds, face_geometry, same_sense); the surface
    is the lone bare reference at position 2.
    """
    part = _face_part(entity)
    assert part is not None
    args = part.args
    ref = None
    if len(args) > 2 and isinstance(args[2], EntityRef):
        ref = args[2]
    else:
        bare = [a for a in args if isinstance(a, EntityRef)]
        if bare:
            ref = bare[-1]
    if ref is None:
        raise UnresolvedGeometry(
            f"face #{entity.id} has no surface reference")
    surface = file.get(ref.target)
    if surface is None:
        raise UnresolvedGeometry(
            f"face #{entity.id} references missing surface #{ref.target}")
    return surface


def _curve_is_bspline(file: StepFile, entity: Entity,
                      _seen: frozenset[int] = frozenset()) -> bool:
    kws = set(entity.keywords)
    if kws & BSPLINE_CURVE_KEYWORDS:
        return True
    if "TRIMMED_CURVE" in kws:
        # spline-ness of a trimmed curve follows its basis curve
        if entity.id in _seen:
            return False
        part = entity.part("TRIMMED_CURVE")
        if part is None or len(part.args) < 2 or not isinstance(part.args[1], EntityRef):
            raise UnresolvedGeometry(
                f"trimmed curve #{entity.id} has no basis reference")
        basis = file.get(part.args[1].target)
        if basis is None:
            raise UnresolvedGeometry(
                f"trimmed curve #{entity.id} references missing basis "
                f"#{part.args[1].target}")
        return _curve_is_bspline(file, basis, _seen | {entity.id})
    return False


def classify_entity(file: StepFile, entity: Entity) -> EntityClass:
    """Face / curve / other, plus whether the geometry is spline-based.

    A face is spline-based when its resolved underlying surface carries a
    spline keyword (complex external-mapping instances count through any
    of their part keywords).
    """
    kws = set(entity.keywords)
    if kws & FACE_KEYWORDS:
        surface = face_surface(file, entity)
        is_b = bool(set(surface.keywords) & BSPLINE_SURFACE_KEYWORDS)
        return EntityClass(EntityKind.FACE, is_b)
    if kws & CURVE_KEYWORDS:
        return EntityClass(EntityKind.CURVE, _curve_is_bspline(file, entity))
    return EntityClass(EntityKind.OTHER, False)


def edge_basis_curves(file: StepFile) -> list[Entity]:
    """Distinct basis-curve geometry entities reachable from edges.

    Edge layout is (name, start_vertex, end_vertex, edge_geometry,
    same_sense). Distinctness is by entity id, so an edge geometry shared
    by several edges counts once.
    """
    seen: dict[int, Entity] = {}
    for entity in file.entities:
        part = entity.part("EDGE_CURVE")
        if part is None:
            continue
        ref = None
        if len(part.args) > 3 and isinstance(part.args[3], EntityRef):
            ref = part.args[3]
        else:
            bare = [a for a in part.args if isinstance(a, EntityRef)]
            if bare:
                ref = bare[-1]
        if ref is None:
            raise UnresolvedGeometry(
                f"edge #{entity.id} has no geometry reference")
        basis = file.get(ref.target)
        if basis is None:
            raise UnresolvedGeometry(
                f"edge #{entity.id} references missing curve #{ref.target}")
        seen.setdefault(basis.id, basis)
    return list(seen.values())


def compute_stats(file: StepFile) -> BRepStats:
    """Face/curve counts, spline counts and the combined spline ratio.

    Degenerate denominators: a missing face (or curve) population
    contributes 0 to its term; a file with neither raises EmptyModel.
    """
    faces = 0
    bspline_faces = 0
    for entity in file.entities:
        cls = classify_entity(file, entity)
        if cls.kind is EntityKind.FACE:
            faces += 1
            if cls.is_bspline:
                bspline_faces += 1

    basis = edge_basis_curves(file)
    curves = len(basis)
    bspline_curves = sum(
        1 for c in basis if classify_entity(file, c).is_bspline)

    if faces == 0 and curves == 0:
        raise EmptyModel("no faces and no edges in the model")

    face_term = bspline_faces / faces if faces else 0.0
    curve_term = bspline_curves / curves if curves else 0.0
    ratio = (face_term + curve_term) / 2.0
    return BRepStats(faces, bspline_faces, curves, bspline_curves,
                     file.line_count, ratio)
