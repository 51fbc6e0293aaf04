"""Corpus-level statistics and run persistence.

`analyze_corpus` folds per-file geometry stats into one report; results
are independent of file enumeration order. `RunStore` lays generation
artifacts out on disk and appends one JSONL manifest row per sample.
"""

from __future__ import annotations

import json
import shutil
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from cadaug.errors import (
    CadaugError, DuplicateSample, EmptyCorpus, EmptyModel, UnresolvedGeometry,
)
from cadaug.metrics import BRepStats, compute_stats
from cadaug.orchestrator import GenerationRecord, STATUS_ACCEPTED
from cadaug.step.parser import load_step

HISTOGRAM_BINS = 10


@dataclass(frozen=True)
class HistBin:
    lo: float
    hi: float
    pct: float


@dataclass(frozen=True)
class CorpusReport:
    n: int
    avg_lines: float
    avg_faces: float
    avg_curves: float
    pct_with_bspline_faces: float
    pct_with_bspline_curves: float
    mean_bspline_ratio: float
    histogram: tuple[HistBin, ...]
    skipped: tuple[tuple[str, str], ...] = ()


def step_files(step_dir: str | Path) -> list[Path]:
    root = Path(step_dir)
    return sorted(p for p in root.rglob("*")
                  if p.is_file() and p.suffix.lower() in (".step", ".stp"))


def ratio_histogram(ratios: Iterable[float],
                    bins: int = HISTOGRAM_BINS) -> tuple[HistBin, ...]:
    """Equal bins over [0, 1], left-closed, 1.0 assigned to the last bin."""
    values = list(ratios)
    counts = [0] * bins
    for r in values:
        index = min(int(r * bins), bins - 1)
        counts[index] += 1
    total = len(values)
    return tuple(
        HistBin(i / bins, (i + 1) / bins,
                100.0 * c / total if total else 0.0)
        for i, c in enumerate(counts))


def analyze_corpus(step_dir: str | Path,
                   bins: int = HISTOGRAM_BINS) -> CorpusReport:
    """Parse every STEP file under `step_dir` and aggregate its stats.

    Files that fail to parse (or whose stats are undefined) land in the
    skip list with a reason; they never silently vanish. Raises
    EmptyCorpus when nothing is analyzable.
    """
    paths = step_files(step_dir)
    stats: list[BRepStats] = []
    skipped: list[tuple[str, str]] = []
    for path in paths:
        try:
            parsed = load_step(path)
            stats.append(compute_stats(parsed))
        except (CadaugError, UnicodeError, OSError) as exc:
            skipped.append((str(path), f"{type(exc).__name__}: {exc}"))
    if not stats:
        raise EmptyCorpus(f"no parseable STEP files under {step_dir}")

    n = len(stats)
    return CorpusReport(
        n=n,
        avg_lines=sum(s.lines for s in stats) / n,
        avg_faces=sum(s.faces for s in stats) / n,
        avg_curves=sum(s.curves for s in stats) / n,
        pct_with_bspline_faces=100.0 * sum(s.bspline_faces >= 1 for s in stats) / n,
        pct_with_bspline_curves=100.0 * sum(s.bspline_curves >= 1 for s in stats) / n,
        mean_bspline_ratio=sum(s.bspline_ratio for s in stats) / n,
        histogram=ratio_histogram((s.bspline_ratio for s in stats), bins),
        skipped=tuple(skipped),
    )


# one row per metric, matching the comparison-table layout
_METRIC_ROWS = (
    ("avg_lines", "avg. lines (STEP)", "{:.2f}"),
    ("avg_faces", "avg. faces", "{:.2f}"),
    ("avg_curves", "avg. curves", "{:.2f}"),
    ("pct_with_bspline_faces", "w/ B-Spline faces (%)", "{:.2f}"),
    ("pct_with_bspline_curves", "w/ B-Spline curves (%)", "{:.2f}"),
    ("mean_bspline_ratio", "B-Spline ratio", "{:.4f}"),
)


def format_report_text(report: CorpusReport) -> str:
    width = max(len(label) for _, label, _ in _METRIC_ROWS)
    lines = [f"{'n':<{width}}  {report.n}"]
    for attr, label, fmt in _METRIC_ROWS:
        lines.append(f"{label:<{width}}  " + fmt.format(getattr(report, attr)))
    if report.skipped:
        lines.append(f"{'skipped files':<{width}}  {len(report.skipped)}")
        for path, reason in report.skipped:
            lines.append(f"  {path}: {reason}")
    return "\n".join(lines) + "\n"


def emit_report(report: CorpusReport, out_dir: str | Path) -> dict[str, Path]:
    """Write report.txt, report.csv and hist.csv; bytes are a pure
    function of the report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    txt = out / "report.txt"
    txt.write_text(format_report_text(report), encoding="utf-8")

    csv = out / "report.csv"
    rows = ["metric,value", f"n,{report.n}"]
    for attr, _, fmt in _METRIC_ROWS:
        rows.append(f"{attr},{fmt.format(getattr(report, attr))}")
    rows.append(f"skipped,{len(report.skipped)}")
    csv.write_text("\n".join(rows) + "\n", encoding="utf-8")

    hist = out / "hist.csv"
    rows = ["bin_lo,bin_hi,pct"]
    for b in report.histogram:
        rows.append(f"{b.lo:.2f},{b.hi:.2f},{b.pct:.4f}")
    hist.write_text("\n".join(rows) + "\n", encoding="utf-8")

    return {"txt": txt, "csv": csv, "hist": hist}


# fixed manifest field names; downstream tooling keys on these
_MANIFEST_FIELDS = ("sample_id", "mode", "family", "status", "iterations",
                    "beta", "f", "fb", "e", "eb", "lines", "step_path")


class RunStore:
    """Artifact layout and append-only manifest for one generation run.

    runs/<run_id>/manifest.jsonl        one row per persisted sample
    runs/<run_id>/config.json           effective config snapshot
    runs/<run_id>/<sample_id>/iter_NN.py, final.step, final.stl
    """

    def __init__(self, root: str | Path, run_id: str,
                 config_snapshot: dict | None = None):
        self.run_dir = Path(root) / run_id
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.run_dir / "manifest.jsonl"
        self._lock = threading.Lock()
        self._seen: set[str] = set()
        if self.manifest_path.exists():
            with open(self.manifest_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._seen.add(json.loads(line)["sample_id"])
        if config_snapshot is not None:
            snap = self.run_dir / "config.json"
            snap.write_text(json.dumps(config_snapshot, indent=2,
                                       sort_keys=True), encoding="utf-8")

    def persist_record(self, record: GenerationRecord) -> dict:
        """Write the record's artifacts and append its manifest row."""
        with self._lock:
            if record.sample_id in self._seen:
                raise DuplicateSample(record.sample_id)
            self._seen.add(record.sample_id)

        sample_dir = self.run_dir / record.sample_id
        sample_dir.mkdir(parents=True, exist_ok=True)
        with open(sample_dir / "iterations.jsonl", "w",
                  encoding="utf-8") as fh:
            for index, iteration in enumerate(record.iterations, start=1):
                (sample_dir / f"iter_{index:02d}.py").write_text(
                    iteration.program_text, encoding="utf-8")
                fh.write(json.dumps({
                    "iteration": index,
                    "verdict": iteration.verdict,
                    "fail_reason": iteration.fail_reason,
                    "exec_status": (iteration.exec_result.status
                                    if iteration.exec_result else None),
                    "wall_time": (iteration.exec_result.wall_time
                                  if iteration.exec_result else None),
                }) + "\n")

        step_path = ""
        stats: BRepStats | None = None
        if record.final_status == STATUS_ACCEPTED:
            source = record.artifacts.get("step_path")
            if source and Path(source).exists():
                target = sample_dir / "final.step"
                shutil.copyfile(source, target)
                step_path = str(target)
                try:
                    stats = compute_stats(load_step(target))
                except (CadaugError, OSError):
                    stats = None
            stl = record.artifacts.get("stl_path")
            if stl and Path(stl).exists():
                shutil.copyfile(stl, sample_dir / "final.stl")

        row = {
            "sample_id": record.sample_id,
            "mode": record.mode,
            "family": record.surface.family if record.surface else None,
            "status": record.final_status,
            "iterations": record.iteration_count,
            "beta": stats.bspline_ratio if stats else None,
            "f": stats.faces if stats else None,
            "fb": stats.bspline_faces if stats else None,
            "e": stats.curves if stats else None,
            "eb": stats.bspline_curves if stats else None,
            "lines": stats.lines if stats else None,
            "step_path": step_path,
        }
        assert tuple(row) == _MANIFEST_FIELDS
        with self._lock:
            with open(self.manifest_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(row) + "\n")
        return row

    def rows(self) -> list[dict]:
        if not self.manifest_path.exists():
            return []
        with open(self.manifest_path, "r", encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
