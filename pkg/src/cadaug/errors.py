"""Exception types shared across the package."""

from __future__ import annotations


class CadaugError(Exception):
    """Base class for all package errors."""


# --- STEP parsing ---------------------------------------------------------

class StepSyntaxError(CadaugError):
    """Malformed Part 21 input. Carries the byte offset of the problem."""

    def __init__(self, position: int, message: str):
        super().__init__(f"at offset {position}: {message}")
        self.position = position
        self.message = message


class MissingSection(CadaugError):
    """HEADER or DATA section absent from the file."""


class DuplicateId(CadaugError):
    """The same #id is defined twice in the DATA section."""

    def __init__(self, entity_id: int):
        super().__init__(f"entity #{entity_id} defined more than once")
        self.entity_id = entity_id


# --- metrics / validation -------------------------------------------------

class UnresolvedGeometry(CadaugError):
    """A face's underlying surface (or a curve's basis) cannot be resolved."""


class EmptyModel(CadaugError):
    """No faces and no curves; geometry ratios are undefined."""


# --- surface generation ---------------------------------------------------

class BadParams(CadaugError):
    """Missing or out-of-range surface parameters."""


# --- prompting ------------------------------------------------------------

class MissingReference(CadaugError):
    """Full prompt mode requires a reference-surface script."""


class EmptyDescription(CadaugError):
    """A design description must be non-empty."""


# --- LLM gateway ----------------------------------------------------------

class GatewayError(CadaugError):
    """Base class for generation-backend failures."""


class TransportError(GatewayError):
    """Request could not be completed after retries."""


class AuthError(GatewayError):
    """Credential missing or rejected."""


class EmptyCompletion(GatewayError):
    """Backend returned an empty completion."""


class CassetteMiss(GatewayError):
    """Replay backend has no entry for the request digest."""


# --- orchestration --------------------------------------------------------

class RunnerUnreachable(CadaugError):
    """The program runner process is gone; distinct from programs failing
    inside it."""


# --- reporting ------------------------------------------------------------

class EmptyCorpus(CadaugError):
    """No parseable STEP files in the corpus directory."""


class DuplicateSample(CadaugError):
    """A sample id was persisted twice into the same run."""
