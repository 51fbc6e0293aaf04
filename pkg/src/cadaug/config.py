"""Layered configuration: defaults < config file < flag overrides.

The config file is YAML with one section per pipeline stage; overrides
are dotted key=value strings from the command line. The effective
snapshot is what gets written into a run manifest.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

import yaml

DEFAULTS: dict = {
    "gateway": {
        "endpoint": "",
        "model_id": "default-model",
        "api_key_env": "CADAUG_API_KEY",
        "auth_header": "Authorization",
        "auth_scheme": "Bearer",
        "reasoning_effort": "high",
        "max_output_tokens": 32768,
        "retries": 3,
        "backoff_base": 2.0,
    },
    "orchestrator": {
        "max_iterations": 8,
        "exec_timeout_s": 120.0,
        "want_kernel_check": True,
        "repair_budget": 4096,
        "parallelism": 1,
    },
    "runner": {
        "mode": "subprocess",        # subprocess | scripted
        "command": [],               # empty -> python -m cadrunner
        "script_path": "",           # scripted mode: JSONL of canned results
    },
    "reporting": {
        "bins": 10,
    },
    "categories": {
        "bracket": {"noun": "bracket"},
    },
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _coerce(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config: dict, overrides: list[str]) -> dict:
    """Apply `section.key=value` strings; values parse as JSON when they
    can, else stay strings."""
    out = copy.deepcopy(config)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        dotted, _, raw = item.partition("=")
        keys = dotted.split(".")
        node = out
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override through scalar {dotted!r}")
        node[keys[-1]] = _coerce(raw)
    return out


def load_config(path: str | Path | None = None,
                overrides: list[str] | None = None) -> dict:
    config = copy.deepcopy(DEFAULTS)
    if path:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        with open(p, "r", encoding="utf-8") as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must contain a mapping")
        config = _merge(config, loaded)
    if overrides:
        config = apply_overrides(config, overrides)
    return config
