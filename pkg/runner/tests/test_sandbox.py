from __future__ import annotations

import time

import pytest

from cadrunner.sandbox import STDERR_BUDGET, execute


def _request(program: str, workdir, timeout=10.0, kernel=False) -> dict:
    return {"program_text": program, "timeout_s": timeout,
            "workdir": str(workdir), "want_kernel_check": kernel}


def test_program_writing_step_is_ok(tmp_path):
    program = "open('output.step', 'w').write('ISO-10303-21;')\n"
    result = execute(_request(program, tmp_path))
    assert result["status"] == "ok"
    assert result["step_path"].endswith("output.step")
    assert result["wall_time"] > 0
    assert result["kernel_valid"] is None  # not requested


def test_output_step_preferred_over_other_names(tmp_path):
    program = (
        "open('aaa.step', 'w').write('x')\n"
        "open('output.step', 'w').write('y')\n"
    )
    result = execute(_request(program, tmp_path))
    assert result["status"] == "ok"
    assert result["step_path"].endswith("output.step")


def test_any_step_name_detected(tmp_path):
    program = "open('saddle.step', 'w').write('ISO')\n"
    result = execute(_request(program, tmp_path))
    assert result["status"] == "ok"
    assert result["step_path"].endswith("saddle.step")


def test_stl_detected(tmp_path):
    program = (
        "open('output.step', 'w').write('x')\n"
        "open('output.stl', 'w').write('solid s\\nendsolid s\\n')\n"
    )
    result = execute(_request(program, tmp_path))
    assert result["stl_path"].endswith("output.stl")


def test_raising_program_reports_error(tmp_path):
    result = execute(_request('raise RuntimeError("blown gasket")', tmp_path))
    assert result["status"] == "exec_error"
    assert "blown gasket" in result["stderr_tail"]
    assert result["step_path"] is None


def test_clean_exit_without_step_is_error(tmp_path):
    result = execute(_request("print('no export')", tmp_path))
    assert result["status"] == "exec_error"
    assert "no STEP file" in result["stderr_tail"]


def test_timeout_kills_child(tmp_path):
    started = time.monotonic()
    result = execute(_request("while True:\n    pass\n", tmp_path,
                              timeout=2.0))
    elapsed = time.monotonic() - started
    assert result["status"] == "timeout"
    assert elapsed < 3.0  # 2s deadline + scheduling slack


def test_timeout_kills_grandchildren(tmp_path):
    program = (
        "import subprocess, sys\n"
        "subprocess.run([sys.executable, '-c', "
        "'import time; time.sleep(600)'])\n"
    )
    started = time.monotonic()
    result = execute(_request(program, tmp_path, timeout=2.0))
    assert result["status"] == "timeout"
    assert time.monotonic() - started < 4.0


def test_stderr_tail_budget_exact(tmp_path):
    program = ("import sys\n"
               "sys.stderr.write('x' * 10000 + 'THE-END')\n"
               "raise SystemExit(1)\n")
    result = execute(_request(program, tmp_path))
    assert result["status"] == "exec_error"
    tail = result["stderr_tail"]
    assert len(tail.encode("utf-8")) <= STDERR_BUDGET
    assert tail.endswith("THE-END")


def test_environment_is_scrubbed(tmp_path, monkeypatch):
    monkeypatch.setenv("SECRET_TOKEN", "hunter2")
    program = (
        "import os\n"
        "assert 'SECRET_TOKEN' not in os.environ, 'leaked'\n"
        "open('output.step', 'w').write('x')\n"
    )
    result = execute(_request(program, tmp_path))
    assert result["status"] == "ok"


def test_child_runs_inside_workdir(tmp_path):
    program = (
        "import os, pathlib\n"
        "pathlib.Path('relative.step').write_text('x')\n"
        "assert os.getcwd() == os.path.realpath(os.getcwd())\n"
    )
    result = execute(_request(program, tmp_path))
    assert result["status"] == "ok"
    assert (tmp_path / "relative.step").exists()


def test_missing_fields_protocol_error(tmp_path):
    result = execute({"program_text": "x"})
    assert result["status"] == "protocol_error"
    assert "missing fields" in result["stderr_tail"]


def test_empty_program_protocol_error(tmp_path):
    result = execute(_request("", tmp_path))
    assert result["status"] == "protocol_error"


def test_nonpositive_timeout_protocol_error(tmp_path):
    result = execute(_request("pass", tmp_path, timeout=0))
    assert result["status"] == "protocol_error"


def test_fresh_process_per_request(tmp_path):
    first = "leak = 'state'\nopen('output.step','w').write('x')\n"
    second = ("assert 'leak' not in dir()\n"
              "open('output.step','w').write('x')\n")
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert execute(_request(first, a))["status"] == "ok"
    assert execute(_request(second, b))["status"] == "ok"


def test_result_wire_fields_complete(tmp_path):
    result = execute(_request("open('output.step','w').write('x')", tmp_path))
    assert set(result) == {"status", "step_path", "stl_path", "stderr_tail",
                           "kernel_valid", "wall_time"}
