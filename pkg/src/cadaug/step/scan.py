"""Scanner implementation selection.

Prefers the compiled extension; falls back to the pure-Python scanner.
Set CADAUG_PURE_SCAN=1 to force the fallback (used by the benchmark).
"""

from __future__ import annotations

import os

if os.environ.get("CADAUG_PURE_SCAN"):
    from cadaug.step._scan_py import scan
    IMPLEMENTATION = "pure-python (forced)"
else:
    try:
        from cadaug.step._scan_c import scan  # type: ignore[no-redef]
        IMPLEMENTATION = "compiled"
    except ImportError:
        from cadaug.step._scan_py import scan  # type: ignore[no-redef]
        IMPLEMENTATION = "pure-python"

__all__ = ["scan", "IMPLEMENTATION"]
