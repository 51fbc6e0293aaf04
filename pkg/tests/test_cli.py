from __future__ import annotations

import json
import shutil

import pytest

import scenario
from cadaug.cli import main
from cadaug.gateway import RecordingBackend
from cadaug.orchestrator import run_batch
from cadaug.step.parser import load_step
from cadaug.step.serializer import save_step


def run_cli(*args) -> int:
    return main(list(args))


# --- surfaces ----------------------------------------------------------------

def test_surfaces_deterministic(tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert run_cli("surfaces", "--family", "saddle", "--count", "3",
                   "--seed", "42", "--out-dir", str(a)) == 0
    assert run_cli("surfaces", "--family", "saddle", "--count", "3",
                   "--seed", "42", "--out-dir", str(b)) == 0
    names = sorted(p.name for p in a.glob("*.py"))
    assert names == ["saddle_42_0.py", "saddle_42_1.py", "saddle_42_2.py"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_surfaces_gaussian_template(tmp_path):
    assert run_cli("surfaces", "--family", "gaussian", "--count", "1",
                   "--out-dir", str(tmp_path)) == 0
    script = next(tmp_path.glob("gaussian_*.py")).read_text(encoding="utf-8")
    assert "math.exp" in script


def test_surfaces_unknown_family(tmp_path, capsys):
    with pytest.raises(SystemExit) as err:
        run_cli("surfaces", "--family", "torus", "--out-dir", str(tmp_path))
    assert err.value.code == 2
    stderr = capsys.readouterr().err
    for family in ("gaussian", "saddle", "wave", "ripple"):
        assert family in stderr


# --- analyze ------------------------------------------------------------------

def test_analyze_fixture_corpus(tmp_path, corpus_dir, capsys):
    out = tmp_path / "report"
    assert run_cli("analyze", str(corpus_dir), "--out", str(out)) == 0
    text = (out / "report.txt").read_text(encoding="utf-8")
    for label in ("avg. lines (STEP)", "avg. faces", "avg. curves",
                  "w/ B-Spline faces (%)", "w/ B-Spline curves (%)",
                  "B-Spline ratio"):
        assert label in text
    hist = (out / "hist.csv").read_text(encoding="utf-8").splitlines()
    assert len(hist) == 11


def test_analyze_with_corrupt_file(tmp_path, corpus_dir, bad_dir):
    work = tmp_path / "mixed"
    work.mkdir()
    shutil.copyfile(corpus_dir / "cube_unit.step", work / "ok.step")
    shutil.copyfile(bad_dir / "not_step.step", work / "corrupt.step")
    out = tmp_path / "report"
    assert run_cli("analyze", str(work), "--out", str(out)) == 0
    text = (out / "report.txt").read_text(encoding="utf-8")
    assert "skipped files" in text
    assert "corrupt.step" in text


def test_analyze_empty_dir(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run_cli("analyze", str(empty), "--out", str(tmp_path / "r")) == 2


# --- validate ------------------------------------------------------------------

def test_validate_pass(corpus_dir, capsys):
    assert run_cli("validate", str(corpus_dir / "cube_unit.step")) == 0
    assert "verdict: pass" in capsys.readouterr().out


def test_validate_fail_names_check(tmp_path, corpus_dir, capsys):
    import mutators
    cube = load_step(corpus_dir / "cube_unit.step")
    broken = mutators.flip_edge_sense(cube)
    path = tmp_path / "broken.step"
    save_step(broken, path)
    assert run_cli("validate", str(path)) == 1
    out = capsys.readouterr().out
    assert "verdict: fail" in out
    assert "orientation" in out


def test_validate_missing_file(tmp_path):
    assert run_cli("validate", str(tmp_path / "nope.step")) == 2


# --- augment -------------------------------------------------------------------

CLI_PLANS = (
    [["ok"]] * 7
    + [["exec_error"] * 5 + ["ok"]]
    + [["invalid"] * 5 + ["ok"]]
    + [["exec_error"] * 8]
)


@pytest.fixture()
def cli_assets(tmp_path):
    """Cassette + scripted-runner table + descriptions file matching what
    the augment subcommand will compose."""
    samples, gateway, runner, config = scenario.build(
        CLI_PLANS, str(tmp_path / "record"), id_format="sample_{:04d}")
    cassette_path = tmp_path / "cassette.jsonl"
    run_batch(samples, RecordingBackend(gateway, cassette_path), runner,
              config)

    script_path = tmp_path / "runner_script.jsonl"
    with open(script_path, "w", encoding="utf-8") as fh:
        for key, result in runner.script.items():
            fh.write(json.dumps({"key": key, "result": result}) + "\n")

    descriptions = tmp_path / "descriptions.txt"
    descriptions.write_text(
        "".join(scenario.description_for(s.sample_id) + "\n"
                for s in samples),
        encoding="utf-8")
    return cassette_path, script_path, descriptions


def test_augment_scripted_batch(tmp_path, cli_assets, capsys):
    cassette, script, descriptions = cli_assets
    code = run_cli(
        "--set", "gateway.model_id=scripted-model",
        "--set", "runner.mode=scripted",
        "--set", f"runner.script_path={script}",
        "augment",
        "--descriptions", str(descriptions),
        "--mode", "minus-rt",
        "--backend", "replay",
        "--cassette", str(cassette),
        "--out", str(tmp_path / "runs"),
        "--run-id", "cli_test",
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "samples: 10" in out
    assert "accepted: 9 (90.0%)" in out
    assert "exceeded_5: 20.0%" in out
    assert "gateway_calls: 27" in out

    manifest = tmp_path / "runs" / "cli_test" / "manifest.jsonl"
    rows = [json.loads(line) for line in
            manifest.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 10
    assert all(row["mode"] == "minus-rt" for row in rows)
    assert sum(row["status"] == "accepted" for row in rows) == 9
    assert (tmp_path / "runs" / "cli_test" / "config.json").exists()


def test_augment_missing_descriptions(tmp_path):
    assert run_cli("augment", "--descriptions", str(tmp_path / "none.txt"),
                   "--backend", "replay",
                   "--cassette", str(tmp_path / "c.jsonl")) == 2


def test_augment_replay_needs_cassette(tmp_path):
    descriptions = tmp_path / "d.txt"
    descriptions.write_text("A bracket.\n", encoding="utf-8")
    assert run_cli("augment", "--descriptions", str(descriptions),
                   "--backend", "replay") == 2


def test_augment_unknown_category(tmp_path, cli_assets):
    _, script, descriptions = cli_assets
    assert run_cli("augment", "--descriptions", str(descriptions),
                   "--category", "starship",
                   "--backend", "replay",
                   "--cassette", str(tmp_path / "c.jsonl")) == 2


def test_augment_full_mode_with_surfaces(tmp_path, capsys):
    """Full mode pairs each description with a sampled reference surface;
    manifest rows record the family."""
    from cadaug.orchestrator import OrchestratorConfig, Sample, run_batch
    from cadaug.prompts import BRACKET
    from cadaug.runner_client import ScriptedRunner, program_digest
    from cadaug.surfaces import FAMILIES, sample_specs

    descriptions = ["A bracket with a domed base.",
                    "A bracket with a curved rib."]
    pool = []
    for family in FAMILIES:
        pool.extend(sample_specs(family, 1, 0))
    surfaces = pool[:2]

    samples = [
        Sample(f"sample_{i:04d}", "full", text, BRACKET, surface=surfaces[i])
        for i, text in enumerate(descriptions)]
    gateway = scenario.PlanGateway(
        {s.sample_id: ["ok"] for s in samples})
    script = {}
    cube_text = (scenario.FIXTURES / "corpus" / "cube_unit.step").read_text(
        encoding="utf-8")
    for s in samples:
        digest = program_digest(scenario._program(s.sample_id, 1, "ok"))
        script[digest] = scenario._result_for("ok", cube_text, cube_text)
    runner = ScriptedRunner(script)

    cassette = tmp_path / "cassette.jsonl"
    config = OrchestratorConfig(model_id="scripted-model",
                                workroot=str(tmp_path / "record"))
    run_batch(samples, RecordingBackend(gateway, cassette), runner, config)

    script_path = tmp_path / "runner.jsonl"
    with open(script_path, "w", encoding="utf-8") as fh:
        for key, result in script.items():
            fh.write(json.dumps({"key": key, "result": result}) + "\n")
    desc_path = tmp_path / "descriptions.txt"
    desc_path.write_text("".join(d + "\n" for d in descriptions),
                         encoding="utf-8")

    code = run_cli(
        "--set", "gateway.model_id=scripted-model",
        "--set", "runner.mode=scripted",
        "--set", f"runner.script_path={script_path}",
        "augment", "--descriptions", str(desc_path),
        "--mode", "full", "--backend", "replay",
        "--cassette", str(cassette),
        "--surface-seed", "0",
        "--out", str(tmp_path / "runs"), "--run-id", "full_test")
    assert code == 0
    rows = [json.loads(line) for line in
            (tmp_path / "runs" / "full_test" / "manifest.jsonl")
            .read_text(encoding="utf-8").splitlines()]
    assert [row["family"] for row in rows] == ["gaussian", "saddle"]
    assert all(row["mode"] == "full" for row in rows)


def test_augment_reads_csv_descriptions(tmp_path, capsys):
    from cadaug.cli import _read_descriptions

    csv_path = tmp_path / "d.csv"
    csv_path.write_text(
        "id,description\n1,A flat bracket.\n2,A curved bracket.\n",
        encoding="utf-8")
    assert _read_descriptions(csv_path) == [
        "A flat bracket.", "A curved bracket."]

    no_header = tmp_path / "plain.csv"
    no_header.write_text("A bracket.\nAnother bracket.\n", encoding="utf-8")
    assert _read_descriptions(no_header) == ["A bracket.", "Another bracket."]


def test_config_file_and_override(tmp_path, cli_assets, capsys):
    cassette, script, descriptions = cli_assets
    config = tmp_path / "config.yaml"
    config.write_text(
        "gateway:\n  model_id: scripted-model\n"
        "runner:\n  mode: scripted\n"
        f"  script_path: {script}\n",
        encoding="utf-8")
    code = run_cli(
        "--config", str(config),
        "augment",
        "--descriptions", str(descriptions),
        "--mode", "minus-rt",
        "--backend", "replay",
        "--cassette", str(cassette),
        "--out", str(tmp_path / "runs2"),
        "--run-id", "cfg_test",
    )
    assert code == 0
    snapshot = json.loads(
        (tmp_path / "runs2" / "cfg_test" / "config.json").read_text())
    assert snapshot["gateway"]["model_id"] == "scripted-model"
    assert snapshot["runner"]["mode"] == "scripted"
