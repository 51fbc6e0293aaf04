"""The two canonical reference-surface scripts must run to completion."""

from __future__ import annotations

import time

from cadrunner.sandbox import execute

SADDLE_SCRIPT = """\
# saddle.py
import cadquery as cq, math
U, V, SPAN, CURV = 300, 300, 50, 0.004

net = []
for i in range(U):
    u = i/(U-1);  x = (u-0.5)*SPAN
    row = []
    for j in range(V):
        v = j/(V-1);  y = (v-0.5)*SPAN
        z = CURV*(x**2 - y**2)
        row.append(cq.Vector(x, y, z))
    net.append(row)

surf = cq.Face.makeSplineApprox(net)
cq.exporters.export(surf, "saddle.step")
"""

GAUSSIAN_SCRIPT = """\
# gaussian.py
import cadquery as cq, math
U, V, SPAN, H = 100, 100, 100, 7

net = []
for i in range(U):
    u = i/(U-1);  x = (u-0.5)*SPAN
    row = []
    for j in range(V):
        v = j/(V-1);  y = (v-0.5)*SPAN
        r2 = (x**2 + y**2)/((SPAN/3)**2)
        z = H * math.exp(-r2)
        row.append(cq.Vector(x, y, z))
    net.append(row)

surf = cq.Face.makeSplineApprox(net).thicken(2).translate((0,0,-1))
cq.exporters.export(surf, "gaussian.step")
"""


def test_saddle_script_exports_step(tmp_path):
    result = execute({"program_text": SADDLE_SCRIPT, "timeout_s": 120,
                      "workdir": str(tmp_path), "want_kernel_check": False})
    assert result["status"] == "ok", result["stderr_tail"]
    assert result["step_path"].endswith("saddle.step")
    text = (tmp_path / "saddle.step").read_text(encoding="utf-8")
    assert "B_SPLINE_SURFACE" in text


def test_gaussian_script_exports_valid_solid(tmp_path):
    started = time.monotonic()
    result = execute({"program_text": GAUSSIAN_SCRIPT, "timeout_s": 120,
                      "workdir": str(tmp_path), "want_kernel_check": True})
    elapsed = time.monotonic() - started
    assert result["status"] == "ok", result["stderr_tail"]
    assert result["step_path"].endswith("gaussian.step")
    assert result["kernel_valid"] is True
    assert elapsed < 120
