"""The generate -> execute -> validate -> repair loop.

Per sample: compose the prompt, ask the gateway for a program, run it,
parse and structurally validate the exported STEP, and on any failure
feed the program plus its error text back into the prompt. The loop
stops at the first fully valid iteration or at the iteration cap.
"""

from __future__ import annotations

import json
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from cadaug.errors import (
    CadaugError, EmptyCompletion, GatewayError, RunnerUnreachable,
)
from cadaug.gateway import LlmRequest
from cadaug.prompts import (
    CategoryConfig, PromptBundle, compose, repair_prompt,
)
from cadaug.runner_client import ExecOutcome, exec_request
from cadaug.step.parser import load_step
from cadaug.surfaces import SurfaceSpec
from cadaug.topology import (
    CheckFailure, ValidationReport, format_report, validate_structure,
)
from cadaug.errors import StepSyntaxError, MissingSection, DuplicateId

STATUS_ACCEPTED = "accepted"
STATUS_EXHAUSTED = "exhausted_retries"
STATUS_HARD_FAILURE = "hard_failure"

EXCEEDED_THRESHOLD = 5


@dataclass(frozen=True)
class Sample:
    sample_id: str
    mode: str
    description: str
    category: CategoryConfig
    surface: SurfaceSpec | None = None


@dataclass
class IterationOutcome:
    program_text: str
    exec_result: ExecOutcome | None
    structure_report: ValidationReport | None
    verdict: str                    # "pass" | "fail"
    fail_reason: str = ""


@dataclass
class GenerationRecord:
    sample_id: str
    mode: str
    prompt: PromptBundle | None
    iterations: list[IterationOutcome]
    final_status: str
    surface: SurfaceSpec | None = None
    artifacts: dict = field(default_factory=dict)

    @property
    def iteration_count(self) -> int:
        return len(self.iterations)

    @property
    def exceeded_five(self) -> bool:
        return self.iteration_count > EXCEEDED_THRESHOLD


@dataclass
class OrchestratorConfig:
    model_id: str = "default-model"
    reasoning_effort: str = "high"
    max_output_tokens: int = 32768
    max_iterations: int = 8
    exec_timeout_s: float = 120.0
    want_kernel_check: bool = True
    repair_budget: int = 4096
    workroot: str | None = None     # scratch dirs go under here


@dataclass
class BatchStats:
    """Aggregates over one batch of generation records.

    `pct_exceeded_five` counts accepted samples that needed more than
    five attempts, over all samples; `pct_exceeded_five_any` also counts
    samples that never succeeded.
    """

    n: int
    accepted: int
    hard_failures: int
    gateway_calls: int
    exceeded_five_accepted: int
    exceeded_five_any: int

    @property
    def acceptance_rate(self) -> float:
        return 100.0 * self.accepted / self.n if self.n else 0.0

    @property
    def pct_exceeded_five(self) -> float:
        return 100.0 * self.exceeded_five_accepted / self.n if self.n else 0.0

    @property
    def pct_exceeded_five_any(self) -> float:
        return 100.0 * self.exceeded_five_any / self.n if self.n else 0.0

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "accepted": self.accepted,
            "hard_failures": self.hard_failures,
            "gateway_calls": self.gateway_calls,
            "acceptance_rate": self.acceptance_rate,
            "exceeded_five_accepted": self.exceeded_five_accepted,
            "exceeded_five_any": self.exceeded_five_any,
            "pct_exceeded_five": self.pct_exceeded_five,
            "pct_exceeded_five_any": self.pct_exceeded_five_any,
        }, sort_keys=True)


def _fail_report(check: str, message: str) -> ValidationReport:
    return ValidationReport("fail", (CheckFailure(check, (), message),))


def _validate_export(step_path: str | None,
                     kernel_valid: bool | None) -> tuple[bool, str, ValidationReport]:
    """(passed, error text, report) for a successful execution."""
    if not step_path:
        message = "execution reported no exported STEP file"
        return False, message, _fail_report("step-export", message)
    try:
        parsed = load_step(step_path)
    except (StepSyntaxError, MissingSection, DuplicateId, OSError) as exc:
        message = f"exported STEP file is unreadable: {exc}"
        return False, message, _fail_report("step-parse", message)
    report = validate_structure(parsed)
    if not report.passed:
        return False, format_report(report), report
    if kernel_valid is False:
        return False, "kernel validity check failed on the exported solid", report
    return True, "", report


def run_sample(sample: Sample, gateway, runner,
               config: OrchestratorConfig) -> GenerationRecord:
    """Drive the loop for one sample; never raises for per-program
    failures, only records them."""
    script = sample.surface.script_text if sample.surface else None
    bundle = compose(sample.mode, sample.category, sample.description, script)
    record = GenerationRecord(
        sample_id=sample.sample_id, mode=sample.mode, prompt=bundle,
        iterations=[], final_status=STATUS_EXHAUSTED, surface=sample.surface)

    workroot = Path(config.workroot) if config.workroot else \
        Path(tempfile.mkdtemp(prefix="cadaug-run-"))

    for iteration in range(1, config.max_iterations + 1):
        request = LlmRequest(
            model_id=config.model_id,
            system_text="",
            user_text=bundle.rendered,
            reasoning_effort=config.reasoning_effort,
            max_output_tokens=config.max_output_tokens,
            request_tag=f"{sample.sample_id}:{iteration}",
        )
        try:
            response = gateway.generate(request)
            program = response.program_text
            gateway_error = ""
        except EmptyCompletion as exc:
            program, gateway_error = "", f"empty completion: {exc}"
        except GatewayError as exc:
            # unrecoverable backend problem: stop this sample
            record.iterations.append(IterationOutcome(
                "", None, None, "fail", f"gateway error: {exc}"))
            record.final_status = STATUS_HARD_FAILURE
            return record

        if not gateway_error and not program.strip():
            gateway_error = "completion contained no program text"
        if gateway_error:
            record.iterations.append(IterationOutcome(
                program, None, None, "fail", gateway_error))
            bundle = repair_prompt(bundle, program, gateway_error,
                                   config.repair_budget)
            continue

        workdir = workroot / sample.sample_id / f"iter_{iteration:02d}"
        workdir.mkdir(parents=True, exist_ok=True)
        try:
            outcome = runner.execute(exec_request(
                program, config.exec_timeout_s, str(workdir),
                config.want_kernel_check))
        except RunnerUnreachable as exc:
            record.iterations.append(IterationOutcome(
                program, None, None, "fail", f"runner unreachable: {exc}"))
            record.final_status = STATUS_HARD_FAILURE
            return record

        if outcome.status != "ok":
            reason = f"execution {outcome.status}"
            error_text = outcome.stderr_tail or reason
            record.iterations.append(IterationOutcome(
                program, outcome, None, "fail", reason))
        else:
            passed, error_text, report = _validate_export(
                outcome.step_path, outcome.kernel_valid)
            if passed:
                record.iterations.append(IterationOutcome(
                    program, outcome, report, "pass"))
                record.final_status = STATUS_ACCEPTED
                record.artifacts = {
                    "step_path": outcome.step_path,
                    "stl_path": outcome.stl_path,
                }
                return record
            record.iterations.append(IterationOutcome(
                program, outcome, report, "fail",
                error_text.splitlines()[0] if error_text else "invalid"))

        bundle = repair_prompt(bundle, program, error_text,
                               config.repair_budget)

    record.final_status = STATUS_EXHAUSTED
    return record


def run_batch(samples: Sequence[Sample], gateway, runner,
              config: OrchestratorConfig,
              parallelism: int = 1) -> tuple[list[GenerationRecord], BatchStats]:
    """Run samples concurrently; one sample failing never aborts the rest."""

    def one(sample: Sample) -> GenerationRecord:
        try:
            return run_sample(sample, gateway, runner, config)
        except CadaugError as exc:
            return GenerationRecord(
                sample_id=sample.sample_id, mode=sample.mode, prompt=None,
                iterations=[IterationOutcome("", None, None, "fail", str(exc))],
                final_status=STATUS_HARD_FAILURE, surface=sample.surface)

    if parallelism <= 1:
        records = [one(s) for s in samples]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(one, samples))

    stats = BatchStats(
        n=len(records),
        accepted=sum(r.final_status == STATUS_ACCEPTED for r in records),
        hard_failures=sum(r.final_status == STATUS_HARD_FAILURE for r in records),
        gateway_calls=sum(r.iteration_count for r in records),
        exceeded_five_accepted=sum(
            r.exceeded_five and r.final_status == STATUS_ACCEPTED
            for r in records),
        exceeded_five_any=sum(r.exceeded_five for r in records),
    )
    return records, stats
