"""Clients for the program-runner protocol.

The runner is a separate process speaking line-delimited JSON on
stdin/stdout: request {program_text, timeout_s, workdir,
want_kernel_check} -> result {status, step_path, stl_path, stderr_tail,
kernel_valid, wall_time}. One request is in flight per process; the
batch layer gets parallelism by owning one client per worker thread.

ScriptedRunner is the in-process stand-in for tests and offline runs:
results are keyed by a digest of the program text.
"""

from __future__ import annotations

import hashlib
import json
import subprocess
import sys
import threading
from dataclasses import dataclass
from pathlib import Path

from cadaug.errors import RunnerUnreachable

DEFAULT_RUNNER_COMMAND = [sys.executable, "-m", "cadrunner"]


@dataclass(frozen=True)
class ExecOutcome:
    """One program execution, as reported over the wire."""

    status: str                    # ok | exec_error | timeout | protocol_error
    step_path: str | None = None
    stl_path: str | None = None
    stderr_tail: str = ""
    kernel_valid: bool | None = None
    wall_time: float = 0.0

    @classmethod
    def from_wire(cls, raw: dict) -> "ExecOutcome":
        return cls(
            status=raw.get("status", "protocol_error"),
            step_path=raw.get("step_path"),
            stl_path=raw.get("stl_path"),
            stderr_tail=raw.get("stderr_tail", ""),
            kernel_valid=raw.get("kernel_valid"),
            wall_time=raw.get("wall_time", 0.0),
        )


def exec_request(program_text: str, timeout_s: float, workdir: str,
                 want_kernel_check: bool) -> dict:
    return {
        "program_text": program_text,
        "timeout_s": timeout_s,
        "workdir": workdir,
        "want_kernel_check": want_kernel_check,
    }


class SubprocessRunner:
    """Owns one runner child process; requests are serialized."""

    def __init__(self, command: list[str] | None = None):
        self.command = list(command or DEFAULT_RUNNER_COMMAND)
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.DEVNULL,
                    text=True,
                )
            except OSError as exc:
                raise RunnerUnreachable(
                    f"cannot launch runner {self.command!r}: {exc}")
        return self._proc

    def execute(self, request: dict) -> ExecOutcome:
        with self._lock:
            proc = self._ensure()
            try:
                proc.stdin.write(json.dumps(request) + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise RunnerUnreachable(f"runner pipe broke: {exc}")
            if not line:
                raise RunnerUnreachable("runner closed its output stream")
            try:
                return ExecOutcome.from_wire(json.loads(line))
            except json.JSONDecodeError as exc:
                raise RunnerUnreachable(
                    f"runner wrote a non-JSON line: {exc}")

    def close(self) -> None:
        with self._lock:
            if self._proc is not None and self._proc.poll() is None:
                self._proc.stdin.close()
                try:
                    self._proc.wait(timeout=5)
                except subprocess.TimeoutExpired:
                    self._proc.kill()
            self._proc = None


class RunnerPool:
    """One SubprocessRunner per worker thread."""

    def __init__(self, command: list[str] | None = None):
        self.command = command
        self._local = threading.local()
        self._all: list[SubprocessRunner] = []
        self._all_lock = threading.Lock()

    def execute(self, request: dict) -> ExecOutcome:
        runner = getattr(self._local, "runner", None)
        if runner is None:
            runner = SubprocessRunner(self.command)
            self._local.runner = runner
            with self._all_lock:
                self._all.append(runner)
        return runner.execute(request)

    def close(self) -> None:
        with self._all_lock:
            for runner in self._all:
                runner.close()
            self._all.clear()


def program_digest(program_text: str) -> str:
    return hashlib.sha256(program_text.encode("utf-8")).hexdigest()


class ScriptedRunner:
    """Deterministic mock: maps program digests to canned results.

    A script entry may carry `step_text`; the runner materializes it as
    `output.step` inside the request workdir so downstream parsing sees
    a real file. The "*" key is the fallback for unknown programs.
    """

    def __init__(self, script: dict[str, dict]):
        self.script = dict(script)
        self._lock = threading.Lock()
        self.calls = 0

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ScriptedRunner":
        script = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                script[entry["key"]] = entry["result"]
        return cls(script)

    def execute(self, request: dict) -> ExecOutcome:
        with self._lock:
            self.calls += 1
        key = program_digest(request["program_text"])
        entry = self.script.get(key, self.script.get("*"))
        if entry is None:
            raise RunnerUnreachable(f"no scripted result for digest {key}")
        result = dict(entry)
        step_text = result.pop("step_text", None)
        if step_text is not None and result.get("status") == "ok":
            workdir = Path(request["workdir"])
            workdir.mkdir(parents=True, exist_ok=True)
            step_path = workdir / "output.step"
            step_path.write_text(step_text, encoding="utf-8")
            result.setdefault("step_path", str(step_path))
        return ExecOutcome.from_wire(result)

    def close(self) -> None:
        pass
