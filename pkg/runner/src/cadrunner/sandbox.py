"""Child-process execution of untrusted CAD programs.

One fresh process per program: scrubbed environment (no credentials, no
inherited PYTHONPATH), cwd pinned to the request workdir, wall-clock
timeout enforced with a process-group kill. Exported files are detected
inside the workdir only.
"""

from __future__ import annotations

import importlib.util
import json
import os
import signal
import subprocess
import sys
import time
from pathlib import Path

STDERR_BUDGET = 4096
_SHIM_DIR = str(Path(__file__).resolve().parent / "kernelshim")

_REQUIRED_FIELDS = ("program_text", "timeout_s", "workdir",
                    "want_kernel_check")


def _kernel_available() -> bool:
    try:
        return importlib.util.find_spec("cadquery") is not None
    except (ImportError, ValueError):
        return False


def _child_env(workdir: str) -> dict[str, str]:
    env = {
        "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
        "HOME": workdir,
        "LANG": os.environ.get("LANG", "C.UTF-8"),
        "PYTHONDONTWRITEBYTECODE": "1",
    }
    if not _kernel_available():
        env["PYTHONPATH"] = _SHIM_DIR
    return env


def _tail(data: bytes, budget: int = STDERR_BUDGET) -> str:
    return data[-budget:].decode("utf-8", errors="replace")


def _find_export(workdir: Path, suffixes: tuple[str, ...],
                 preferred: str) -> str | None:
    hits = sorted(p for p in workdir.rglob("*")
                  if p.is_file() and p.suffix.lower() in suffixes)
    if not hits:
        return None
    for hit in hits:
        if hit.name == preferred:
            return str(hit)
    return str(hits[0])


def _result(status: str, *, step_path=None, stl_path=None, stderr_tail="",
            kernel_valid=None, wall_time=0.0) -> dict:
    return {
        "status": status,
        "step_path": step_path,
        "stl_path": stl_path,
        "stderr_tail": stderr_tail,
        "kernel_valid": kernel_valid,
        "wall_time": round(wall_time, 4),
    }


def _run_child(args: list[str], workdir: str, timeout_s: float,
               env: dict[str, str]):
    """(returncode or None on timeout, stderr bytes, wall seconds)."""
    started = time.monotonic()
    proc = subprocess.Popen(
        args, cwd=workdir, env=env,
        stdout=subprocess.DEVNULL, stderr=subprocess.PIPE,
        start_new_session=True,
    )
    try:
        _, err = proc.communicate(timeout=timeout_s)
        return proc.returncode, err, time.monotonic() - started
    except subprocess.TimeoutExpired:
        try:
            os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            proc.kill()
        _, err = proc.communicate()
        return None, err or b"", time.monotonic() - started


def execute(request: dict) -> dict:
    """Run one program; protocol errors and program failures are data."""
    missing = [f for f in _REQUIRED_FIELDS if f not in request]
    if missing:
        return _result("protocol_error",
                       stderr_tail=f"missing fields: {', '.join(missing)}")
    program_text = request["program_text"]
    timeout_s = float(request["timeout_s"])
    if not program_text or timeout_s <= 0:
        return _result("protocol_error",
                       stderr_tail="program_text must be non-empty and "
                                   "timeout_s positive")

    workdir = Path(request["workdir"]).resolve()
    workdir.mkdir(parents=True, exist_ok=True)
    program = workdir / "program.py"
    program.write_text(program_text, encoding="utf-8")
    env = _child_env(str(workdir))

    code, err, wall = _run_child([sys.executable, str(program)],
                                 str(workdir), timeout_s, env)
    if code is None:
        return _result("timeout", stderr_tail=_tail(err), wall_time=wall)
    if code != 0:
        return _result("exec_error", stderr_tail=_tail(err), wall_time=wall)

    step_path = _find_export(workdir, (".step", ".stp"), "output.step")
    stl_path = _find_export(workdir, (".stl",), "output.stl")
    if step_path is None or Path(step_path).stat().st_size == 0:
        return _result(
            "exec_error", stl_path=stl_path,
            stderr_tail=_tail(err + b"\nprogram exited cleanly but wrote "
                                    b"no STEP file"),
            wall_time=wall)

    kernel_valid = None
    if request["want_kernel_check"]:
        kernel_valid = _kernel_check(step_path, str(workdir), env)

    return _result("ok", step_path=step_path, stl_path=stl_path,
                   stderr_tail=_tail(err), kernel_valid=kernel_valid,
                   wall_time=wall)


def _kernel_check(step_path: str, workdir: str,
                  env: dict[str, str]) -> bool | None:
    check_env = dict(env)
    # the check needs this package importable; the program child does not
    check_env["PYTHONPATH"] = os.pathsep.join(
        p for p in (env.get("PYTHONPATH"), *sys.path) if p)
    try:
        proc = subprocess.run(
            [sys.executable, "-m", "cadrunner.kernelcheck", step_path],
            cwd=workdir, env=check_env, capture_output=True, timeout=60)
        return bool(json.loads(proc.stdout)["kernel_valid"])
    except (subprocess.TimeoutExpired, json.JSONDecodeError, KeyError,
            OSError):
        return None
