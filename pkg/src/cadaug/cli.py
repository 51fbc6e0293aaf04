"""Command-line entry point.

Subcommands cover the pipeline end to end: `surfaces` emits reference
scripts, `augment` runs the generation loop over a description file,
`analyze` reports corpus statistics, `validate` checks one STEP file.

Exit codes: 0 success, 1 domain failure, 2 usage or config error,
3 environment error (runner unreachable).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from cadaug.config import ConfigError, load_config
from cadaug.errors import (
    BadParams, CadaugError, EmptyCorpus, RunnerUnreachable,
)
from cadaug.gateway import HttpBackend, RecordingBackend, ReplayBackend
from cadaug.orchestrator import (
    OrchestratorConfig, Sample, STATUS_ACCEPTED, run_batch,
)
from cadaug.prompts import MODES, category_from_mapping
from cadaug.reporting import RunStore, analyze_corpus, emit_report
from cadaug.runner_client import RunnerPool, ScriptedRunner
from cadaug.step.parser import load_step
from cadaug.surfaces import FAMILIES, sample_specs, write_scripts
from cadaug.topology import format_report, validate_structure

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_ENV = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cadaug",
        description="CAD program corpus augmentation pipeline")
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="override a config value (dotted key)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surfaces", help="emit reference-surface scripts")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="surfaces")

    p = sub.add_parser("augment", help="run the generation loop")
    p.add_argument("--descriptions", required=True,
                   help="text file (one description per line) or CSV")
    p.add_argument("--category", default="bracket")
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--backend", choices=("live", "replay"), default="replay")
    p.add_argument("--cassette", help="recording file (replay source or "
                                      "live-capture target)")
    p.add_argument("--parallelism", type=int, default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--surface-seed", type=int, default=0)
    p.add_argument("--surface-family", default="mixed",
                   choices=FAMILIES + ("mixed",))
    p.add_argument("--out", default="runs")
    p.add_argument("--run-id", default=None)

    p = sub.add_parser("analyze", help="corpus geometry statistics")
    p.add_argument("step_dir")
    p.add_argument("--out", default="report")

    p = sub.add_parser("validate", help="structural checks on one STEP file")
    p.add_argument("step_file")

    return parser


def _read_descriptions(path: Path) -> list[str]:
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = [row for row in reader if row]
        if not rows:
            return []
        header = [c.strip().lower() for c in rows[0]]
        if "description" in header:
            col = header.index("description")
            rows = rows[1:]
        else:
            col = 0
        return [row[col].strip() for row in rows if row[col].strip()]
    with open(path, "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def _cmd_surfaces(args) -> int:
    try:
        specs = sample_specs(args.family, args.count, args.seed)
        paths = write_scripts(specs, args.out_dir, args.seed)
    except BadParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in paths:
        print(path)
    return EXIT_OK


def _make_runner(config: dict):
    runner_cfg = config["runner"]
    if runner_cfg["mode"] == "scripted":
        script_path = runner_cfg["script_path"]
        if not script_path or not Path(script_path).exists():
            raise ConfigError(
                f"scripted runner needs runner.script_path "
                f"(got {script_path!r})")
        return ScriptedRunner.from_jsonl(script_path)
    command = runner_cfg["command"] or None
    return RunnerPool(command)


def _make_gateway(args, config: dict):
    if args.backend == "replay":
        if not args.cassette:
            raise ConfigError("--backend replay requires --cassette")
        return ReplayBackend(args.cassette)
    g = config["gateway"]
    if not g["endpoint"]:
        raise ConfigError("gateway.endpoint is not configured")
    backend = HttpBackend(
        endpoint=g["endpoint"], api_key_env=g["api_key_env"],
        auth_header=g["auth_header"], auth_scheme=g["auth_scheme"],
        retries=g["retries"], backoff_base=g["backoff_base"])
    if args.cassette:
        backend = RecordingBackend(backend, args.cassette)
    return backend


def _cmd_augment(args, config: dict) -> int:
    desc_path = Path(args.descriptions)
    if not desc_path.exists():
        print(f"error: descriptions file not found: {desc_path}",
              file=sys.stderr)
        return EXIT_USAGE
    descriptions = _read_descriptions(desc_path)
    if not descriptions:
        print("error: no descriptions found", file=sys.stderr)
        return EXIT_USAGE

    categories = config["categories"]
    if args.category not in categories:
        print(f"error: unknown category {args.category!r}; configured: "
              f"{', '.join(sorted(categories))}", file=sys.stderr)
        return EXIT_USAGE
    category = category_from_mapping(
        {"name": args.category, **categories[args.category]})

    orch = config["orchestrator"]
    if args.max_iterations is not None:
        orch["max_iterations"] = args.max_iterations
    if args.parallelism is not None:
        orch["parallelism"] = args.parallelism

    surfaces = None
    if args.mode == "full":
        families = (FAMILIES if args.surface_family == "mixed"
                    else (args.surface_family,))
        per_family = -(-len(descriptions) // len(families))  # ceil
        pool = []
        for family in families:
            pool.extend(sample_specs(family, per_family, args.surface_seed))
        surfaces = pool[:len(descriptions)]

    samples = []
    for index, description in enumerate(descriptions):
        samples.append(Sample(
            sample_id=f"sample_{index:04d}",
            mode=args.mode,
            description=description,
            category=category,
            surface=surfaces[index] if surfaces else None,
        ))

    gateway = _make_gateway(args, config)
    runner = _make_runner(config)

    run_id = args.run_id or time.strftime("run_%Y%m%d_%H%M%S")
    store = RunStore(args.out, run_id, config_snapshot=config)

    ocfg = OrchestratorConfig(
        model_id=config["gateway"]["model_id"],
        reasoning_effort=config["gateway"]["reasoning_effort"],
        max_output_tokens=config["gateway"]["max_output_tokens"],
        max_iterations=orch["max_iterations"],
        exec_timeout_s=orch["exec_timeout_s"],
        want_kernel_check=orch["want_kernel_check"],
        repair_budget=orch["repair_budget"],
        workroot=str(store.run_dir / "scratch"),
    )
    try:
        records, stats = run_batch(samples, gateway, runner, ocfg,
                                   parallelism=orch["parallelism"])
    finally:
        runner.close()

    runner_gone = stats.accepted == 0 and any(
        r.iterations and "runner unreachable" in r.iterations[-1].fail_reason
        for r in records)
    for record in records:
        store.persist_record(record)

    print(f"run_id: {run_id}")
    print(f"samples: {stats.n}")
    print(f"accepted: {stats.accepted} ({stats.acceptance_rate:.1f}%)")
    print(f"hard_failures: {stats.hard_failures}")
    print(f"gateway_calls: {stats.gateway_calls}")
    print(f"exceeded_5: {stats.pct_exceeded_five:.1f}%")
    print(f"exceeded_5_any: {stats.pct_exceeded_five_any:.1f}%")

    if runner_gone:
        return EXIT_ENV
    return EXIT_OK if stats.accepted >= 1 else EXIT_DOMAIN


def _cmd_analyze(args, config: dict) -> int:
    step_dir = Path(args.step_dir)
    if not step_dir.is_dir():
        print(f"error: not a directory: {step_dir}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = analyze_corpus(step_dir, bins=config["reporting"]["bins"])
    except EmptyCorpus as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    paths = emit_report(report, args.out)
    print(paths["txt"].read_text(encoding="utf-8"), end="")
    print(f"written: {paths['txt']}, {paths['csv']}, {paths['hist']}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    path = Path(args.step_file)
    if not path.exists():
        print(f"error: no such file: {path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        parsed = load_step(path)
    except CadaugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    report = validate_structure(parsed)
    print(format_report(report))
    return EXIT_OK if report.passed else EXIT_DOMAIN


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "surfaces":
            return _cmd_surfaces(args)
        if args.command == "augment":
            return _cmd_augment(args, config)
        if args.command == "analyze":
            return _cmd_analyze(args, config)
        if args.command == "validate":
            return _cmd_validate(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RunnerUnreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
