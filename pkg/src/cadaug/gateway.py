"""Chat-completion backends for program generation.

Two interchangeable backends: a live HTTPS JSON client with retry, and a
deterministic record/replay store so the whole test suite runs offline.
The replay key is a digest over the semantic request fields only
(model, system text, user text, reasoning effort); operational knobs
like token limits do not invalidate recordings.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import requests

from cadaug.errors import (
    AuthError, CassetteMiss, EmptyCompletion, TransportError,
)

DEFAULT_RETRIES = 3
DEFAULT_BACKOFF_BASE = 2.0
RETRYABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class LlmRequest:
    model_id: str
    system_text: str
    user_text: str
    reasoning_effort: str = "high"
    max_output_tokens: int = 32768
    request_tag: str = ""

    def __post_init__(self):
        if not self.user_text:
            raise ValueError("user_text must be non-empty")


@dataclass(frozen=True)
class LlmResponse:
    program_text: str
    raw_text: str
    usage: Mapping[str, int] = field(default_factory=dict)
    latency: float = 0.0


def request_digest(request: LlmRequest) -> str:
    """Stable key over the fields that change the completion."""
    payload = json.dumps(
        {
            "model_id": request.model_id,
            "system_text": request.system_text,
            "user_text": request.user_text,
            "reasoning_effort": request.reasoning_effort,
        },
        sort_keys=True, ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def extract_program(raw_text: str) -> str:
    """The largest fenced code block, or the whole text when unfenced."""
    blocks = _FENCE_RE.findall(raw_text)
    if not blocks:
        return raw_text
    return max(blocks, key=len)


class Cassette:
    """Append-only JSONL store of {digest, raw_text, usage} entries."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    entry = json.loads(line)
                    self._entries[entry["digest"]] = entry

    def lookup(self, digest: str) -> dict | None:
        return self._entries.get(digest)

    def record(self, request: LlmRequest, response: LlmResponse) -> dict:
        entry = {
            "digest": request_digest(request),
            "raw_text": response.raw_text,
            "usage": dict(response.usage),
        }
        with self._lock:
            self._entries[entry["digest"]] = entry
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
        return entry

    def __len__(self) -> int:
        return len(self._entries)


class ReplayBackend:
    """Deterministic offline backend over a recorded cassette."""

    def __init__(self, cassette: Cassette | str | Path):
        self.cassette = (cassette if isinstance(cassette, Cassette)
                         else Cassette(cassette))

    def generate(self, request: LlmRequest) -> LlmResponse:
        digest = request_digest(request)
        entry = self.cassette.lookup(digest)
        if entry is None:
            raise CassetteMiss(
                f"no recording for request {request.request_tag or digest}")
        raw = entry["raw_text"]
        if not raw.strip():
            raise EmptyCompletion("recorded completion is empty")
        return LlmResponse(
            program_text=extract_program(raw),
            raw_text=raw,
            usage=entry.get("usage", {}),
            latency=0.0,
        )


class HttpBackend:
    """Generic chat-completion client.

    Endpoint path and auth header are configuration; the payload is the
    common shape: one system message, one user message, single text
    completion back. Transient transport failures are retried with
    exponential backoff.
    """

    def __init__(self, endpoint: str, api_key_env: str = "CADAUG_API_KEY",
                 auth_header: str = "Authorization",
                 auth_scheme: str = "Bearer",
                 retries: int = DEFAULT_RETRIES,
                 backoff_base: float = DEFAULT_BACKOFF_BASE,
                 timeout: float = 600.0, max_in_flight: int = 4,
                 post=requests.post, sleep=time.sleep):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.auth_header = auth_header
        self.auth_scheme = auth_scheme
        self.retries = retries
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._post = post
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def _headers(self) -> dict[str, str]:
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise AuthError(
                f"credential env var {self.api_key_env} is not set")
        value = f"{self.auth_scheme} {key}".strip()
        return {self.auth_header: value, "Content-Type": "application/json"}

    def generate(self, request: LlmRequest) -> LlmResponse:
        payload = {
            "model": request.model_id,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
            "reasoning_effort": request.reasoning_effort,
            "max_tokens": request.max_output_tokens,
        }
        if not request.system_text:
            payload["messages"] = payload["messages"][1:]
        headers = self._headers()

        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            start = time.monotonic()
            try:
                with self._slots:
                    resp = self._post(self.endpoint, json=payload,
                                      headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"backend rejected credential "
                                f"(HTTP {resp.status_code})")
            if resp.status_code in RETRYABLE_STATUS:
                last_error = TransportError(
                    f"HTTP {resp.status_code}: {resp.text[:200]}")
                continue
            if resp.status_code != 200:
                raise TransportError(
                    f"HTTP {resp.status_code}: {resp.text[:200]}")
            latency = time.monotonic() - start
            body = resp.json()
            raw = _completion_text(body)
            if not raw.strip():
                raise EmptyCompletion("backend returned an empty completion")
            return LlmResponse(
                program_text=extract_program(raw),
                raw_text=raw,
                usage=body.get("usage", {}),
                latency=latency,
            )
        raise TransportError(
            f"request failed after {self.retries + 1} attempts: {last_error}")


def _completion_text(body: Mapping) -> str:
    try:
        return body["choices"][0]["message"]["content"] or ""
    except (KeyError, IndexError, TypeError):
        raise TransportError(f"unexpected response shape: {str(body)[:200]}")


class RecordingBackend:
    """Wrap a live backend and append every completion to a cassette."""

    def __init__(self, inner, cassette: Cassette | str | Path):
        self.inner = inner
        self.cassette = (cassette if isinstance(cassette, Cassette)
                         else Cassette(cassette))

    def generate(self, request: LlmRequest) -> LlmResponse:
        response = self.inner.generate(request)
        self.cassette.record(request, response)
        return response
