"""Kernel-level validity check for an exported STEP file.

Run as a child process: ``python -m cadrunner.kernelcheck <file.step>``;
prints one JSON object {"kernel_valid": bool}.

With real CadQuery installed the solid is loaded and asked for validity.
Under the shim there is no geometric kernel, so the stand-in is a
self-contained structural scan: at least one closed shell and every
referenced edge used exactly twice.
"""

from __future__ import annotations

import json
import re
import sys


def _structural_scan(text: str) -> bool:
    ids: dict[int, str] = {}
    args: dict[int, str] = {}
    for m in re.finditer(r"#(\d+)\s*=\s*([A-Z_][A-Z0-9_]*)\s*\((.*?)\)\s*;",
                         text, re.DOTALL):
        ids[int(m.group(1))] = m.group(2)
        args[int(m.group(1))] = m.group(3)

    shells = [e for e, kw in ids.items() if kw == "CLOSED_SHELL"]
    if not shells or any(kw == "OPEN_SHELL" for kw in ids.values()):
        return False

    uses: dict[int, int] = {}
    for eid, kw in ids.items():
        if kw != "ORIENTED_EDGE":
            continue
        refs = re.findall(r"#(\d+)", args[eid])
        if not refs:
            return False
        uses[int(refs[-1])] = uses.get(int(refs[-1]), 0) + 1
    if not uses:
        return False
    return all(count == 2 for count in uses.values())


def check(path: str) -> bool:
    try:
        import cadquery as cq
    except ImportError:
        cq = None

    if cq is not None and not getattr(cq, "__shim__", False):
        try:
            shape = cq.importers.importStep(path)
            solids = shape.solids().vals()
            return bool(solids) and all(s.isValid() for s in solids)
        except Exception:
            return False

    try:
        with open(path, "r", encoding="utf-8", errors="replace") as fh:
            return _structural_scan(fh.read())
    except OSError:
        return False


def main() -> int:
    if len(sys.argv) != 2:
        print(json.dumps({"kernel_valid": False}))
        return 1
    print(json.dumps({"kernel_valid": check(sys.argv[1])}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
