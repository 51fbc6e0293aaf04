"""Structural validation of parsed B-rep shells.

Five graph-level checks, run in order, all failures collected:

1. reference-resolution: every #id reference resolves.
2. shell-closure: every solid's shell is a CLOSED_SHELL and no
   OPEN_SHELL exists anywhere in the file.
3. edge-manifold: within each closed shell, every distinct edge is used
   by exactly two oriented-edge occurrences across the shell's faces.
4. orientation: the two uses of each edge run in opposite directions
   (oriented-edge flag combined with the owning bound's orientation).
5. non-empty: at least one closed shell and at least four faces.

Geometric closure (vertex coincidence within tolerance) needs a CAD
kernel and is left to the runner's kernel_valid flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cadaug.metrics import FACE_KEYWORDS
from cadaug.step.model import ArgList, Entity, EntityRef, EnumToken, StepFile
from cadaug.step.parser import resolve_refs

CHECK_REFERENCES = "reference-resolution"
CHECK_CLOSURE = "shell-closure"
CHECK_MANIFOLD = "edge-manifold"
CHECK_ORIENTATION = "orientation"
CHECK_NON_EMPTY = "non-empty"

SOLID_KEYWORDS = frozenset({"MANIFOLD_SOLID_BREP", "BREP_WITH_VOIDS"})


@dataclass(frozen=True)
class CheckFailure:
    check: str
    entity_ids: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    verdict: str  # "pass" | "fail"
    failures: tuple[CheckFailure, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _ref_args(entity: Entity, keyword: str, index: int) -> list[EntityRef]:
    """References inside the list argument at `index` of `keyword`'s part."""
    part = entity.part(keyword)
    if part is None or len(part.args) <= index:
        return []
    arg = part.args[index]
    if isinstance(arg, ArgList):
        return [a for a in arg.items if isinstance(a, EntityRef)]
    if isinstance(arg, EntityRef):
        return [arg]
    return []


def _enum_flag(entity: Entity, keyword: str, index: int) -> bool | None:
    part = entity.part(keyword)
    if part is None or len(part.args) <= index:
        return None
    arg = part.args[index]
    if isinstance(arg, EnumToken):
        return arg.name == "T"
    return None


def _shell_edge_uses(file: StepFile, shell: Entity):
    """(edge id -> list of effective senses, face count, vertex ids) for
    one shell; unresolved links are skipped (check 1 reports them)."""
    uses: dict[int, list[bool]] = {}
    vertices: set[int] = set()
    faces = _ref_args(shell, shell.keywords[0], 1)
    face_count = 0
    for face_ref in faces:
        face = file.get(face_ref.target)
        if face is None:
            continue
        face_kw = next((k for k in face.keywords if k in FACE_KEYWORDS), None)
        if face_kw is None:
            continue
        face_count += 1
        for bound_ref in _ref_args(face, face_kw, 1):
            bound = file.get(bound_ref.target)
            if bound is None:
                continue
            bound_kw = bound.keywords[0]
            bound_flag = _enum_flag(bound, bound_kw, 2)
            loop_refs = _ref_args(bound, bound_kw, 1)
            for loop_ref in loop_refs:
                loop = file.get(loop_ref.target)
                if loop is None:
                    continue
                for oe_ref in _ref_args(loop, loop.keywords[0], 1):
                    oe = file.get(oe_ref.target)
                    if oe is None:
                        continue
                    edge_refs = _ref_args(oe, oe.keywords[0], 3)
                    oe_flag = _enum_flag(oe, oe.keywords[0], 4)
                    if not edge_refs or oe_flag is None:
                        continue
                    edge = file.get(edge_refs[0].target)
                    if edge is None:
                        continue
                    # a reversed bound flips the traversal direction
                    effective = oe_flag if bound_flag in (True, None) else not oe_flag
                    uses.setdefault(edge.id, []).append(effective)
                    for vref in _ref_args(edge, "EDGE_CURVE", 1) + \
                                _ref_args(edge, "EDGE_CURVE", 2):
                        vertices.add(vref.target)
    return uses, face_count, vertices


def validate_structure(file: StepFile) -> ValidationReport:
    """Run the five-check suite; failures are data, not exceptions."""
    failures: list[CheckFailure] = []
    warnings: list[str] = []

    unresolved = resolve_refs(file)
    if unresolved:
        failures.append(CheckFailure(
            CHECK_REFERENCES,
            tuple(src for src, _ in unresolved),
            "unresolved references: " + ", ".join(
                f"#{src}->#{missing}" for src, missing in unresolved),
        ))

    solids = [e for e in file.entities if set(e.keywords) & SOLID_KEYWORDS]
    for solid in solids:
        kw = next(k for k in solid.keywords if k in SOLID_KEYWORDS)
        shell_refs = _ref_args(solid, kw, 1)
        for ref in shell_refs:
            shell = file.get(ref.target)
            if shell is None:
                continue  # reported by check 1
            if "CLOSED_SHELL" not in shell.keywords:
                failures.append(CheckFailure(
                    CHECK_CLOSURE, (solid.id, shell.id),
                    f"solid #{solid.id} shell #{shell.id} is "
                    f"{shell.keywords[0]}, not CLOSED_SHELL"))
    for open_shell in file.entities_with_keyword("OPEN_SHELL"):
        failures.append(CheckFailure(
            CHECK_CLOSURE, (open_shell.id,),
            f"#{open_shell.id} is an OPEN_SHELL"))

    closed_shells = file.entities_with_keyword("CLOSED_SHELL")
    total_faces = 0
    for shell in closed_shells:
        uses, face_count, vertices = _shell_edge_uses(file, shell)
        total_faces += face_count

        bad_counts = {eid: s for eid, s in uses.items() if len(s) != 2}
        if bad_counts:
            detail = ", ".join(
                f"#{eid} used {len(s)}x" for eid, s in sorted(bad_counts.items()))
            failures.append(CheckFailure(
                CHECK_MANIFOLD, tuple(sorted(bad_counts)),
                f"shell #{shell.id}: edges not used exactly twice: {detail}"))

        same_sense = [eid for eid, s in sorted(uses.items())
                      if len(s) == 2 and s[0] == s[1]]
        if same_sense:
            failures.append(CheckFailure(
                CHECK_ORIENTATION, tuple(same_sense),
                f"shell #{shell.id}: edges traversed twice in the same "
                "direction: " + ", ".join(f"#{e}" for e in same_sense)))

        if not bad_counts and uses:
            v, e, f = len(vertices), len(uses), face_count
            multi_bound = any(
                len(_ref_args(face, fk, 1)) > 1
                for fref in _ref_args(shell, shell.keywords[0], 1)
                if (face := file.get(fref.target)) is not None
                for fk in face.keywords if fk in FACE_KEYWORDS)
            if not multi_bound and v and v - e + f != 2:
                warnings.append(
                    f"shell #{shell.id}: V-E+F = {v}-{e}+{f} = {v - e + f}, "
                    "expected 2 for a simple closed shell")

    if not closed_shells:
        failures.append(CheckFailure(
            CHECK_NON_EMPTY, (), "no closed shell in the file"))
    file_faces = [e for e in file.entities if set(e.keywords) & FACE_KEYWORDS]
    if len(file_faces) < 4:
        failures.append(CheckFailure(
            CHECK_NON_EMPTY, tuple(e.id for e in file_faces),
            f"only {len(file_faces)} faces; a closed solid needs at least 4"))

    verdict = "pass" if not failures else "fail"
    return ValidationReport(verdict, tuple(failures), tuple(warnings))


def format_report(report: ValidationReport) -> str:
    lines = [f"verdict: {report.verdict}"]
    for failure in report.failures:
        ids = ",".join(f"#{i}" for i in failure.entity_ids)
        lines.append(f"[{failure.check}] {failure.message}"
                     + (f" (entities {ids})" if ids else ""))
    for warning in report.warnings:
        lines.append(f"[warning] {warning}")
    return "\n".join(lines)
