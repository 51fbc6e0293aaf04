#!/usr/bin/env python3
"""Export the four reference surfaces through the runner and commit the
resulting STEP files as corpus fixtures.

Requires both packages installed. Run from the repo root:
    python scripts/make_surface_fixtures.py
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

from cadrunner.sandbox import execute

from cadaug.surfaces import emit_script_text

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus"

SPECS = {
    "saddle": {"u": 300, "v": 300, "span": 50, "curv": 0.004},
    "gaussian": {"u": 100, "v": 100, "span": 100, "h": 7},
    "wave": {"u": 100, "v": 100, "span": 100, "a": 4, "wavelength": 25},
    "ripple": {"u": 100, "v": 100, "span": 120, "a": 3, "k": 0.3, "d": 0.02},
}


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for family, params in SPECS.items():
        script = emit_script_text(family, params)
        with tempfile.TemporaryDirectory() as workdir:
            result = execute({
                "program_text": script,
                "timeout_s": 300,
                "workdir": workdir,
                "want_kernel_check": False,
            })
            if result["status"] != "ok":
                print(f"{family}: {result['status']}\n"
                      f"{result['stderr_tail']}", file=sys.stderr)
                return 1
            target = OUT / f"surface_{family}.step"
            shutil.copyfile(result["step_path"], target)
            print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
