"""Reference-surface generation: control-point nets and the CAD scripts
that rebuild them.

Four families of organic height fields over a centered square patch:

    gaussian  z = h * exp(-(x^2 + y^2) / ((span/3)^2))
    saddle    z = curv * (x^2 - y^2)
    wave      z = a * sin(2*pi*x / wavelength)
    ripple    z = a * sin(k*r) * exp(-d*r),  r = sqrt(x^2 + y^2)

The net is sampled on the uniform lattice u_i = i/(u-1), v_j = j/(v-1),
x = (u_i - 0.5)*span, y = (v_j - 0.5)*span. Scripts are emitted from
per-family templates and are deterministic in (family, params).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from cadaug.errors import BadParams

FAMILIES = ("gaussian", "saddle", "wave", "ripple")

# sampled parameter ranges; curvature runs shallow to deep
DEFAULT_RANGES: dict[str, dict[str, tuple[float, float]]] = {
    "common": {"span": (50.0, 300.0)},
    "saddle": {"curv": (0.001, 0.01)},
    "gaussian": {"h": (2.0, 15.0)},
    "wave": {"a": (1.0, 8.0)},        # wavelength drawn from span/6..span/2
    "ripple": {"a": (1.0, 6.0), "k": (0.1, 0.5), "d": (0.0, 0.05)},
}
NET_SIZES = (50, 100, 300)

_REQUIRED = {
    "gaussian": ("u", "v", "span", "h"),
    "saddle": ("u", "v", "span", "curv"),
    "wave": ("u", "v", "span", "a", "wavelength"),
    "ripple": ("u", "v", "span", "a", "k", "d"),
}


def height_function(family: str, params: Mapping[str, float]) -> Callable:
    """The family height field z(x, y); works on scalars and arrays."""
    _check_params(family, params)
    if family == "gaussian":
        h, span = params["h"], params["span"]
        return lambda x, y: h * np.exp(-(x * x + y * y) / ((span / 3.0) ** 2))
    if family == "saddle":
        curv = params["curv"]
        return lambda x, y: curv * (x * x - y * y)
    if family == "wave":
        a, wl = params["a"], params["wavelength"]
        return lambda x, y: a * np.sin(2.0 * np.pi * x / wl)
    if family == "ripple":
        a, k, d = params["a"], params["k"], params["d"]

        def ripple(x, y):
            r = np.sqrt(x * x + y * y)
            return a * np.sin(k * r) * np.exp(-d * r)

        return ripple
    raise BadParams(f"unknown family {family!r}; valid: {', '.join(FAMILIES)}")


def _check_params(family: str, params: Mapping[str, float]) -> None:
    if family not in FAMILIES:
        raise BadParams(
            f"unknown family {family!r}; valid: {', '.join(FAMILIES)}")
    missing = [k for k in _REQUIRED[family] if k not in params]
    if missing:
        raise BadParams(f"{family}: missing parameters {missing}")
    if params["span"] <= 0:
        raise BadParams("span must be positive")
    if params["u"] < 2 or params["v"] < 2:
        raise BadParams("net needs at least 2 samples per direction")
    if family == "wave" and params["wavelength"] <= 0:
        raise BadParams("wavelength must be positive")


def make_net(family: str, params: Mapping[str, float]) -> np.ndarray:
    """U x V x 3 control net on the uniform lattice."""
    _check_params(family, params)
    u_n, v_n, span = int(params["u"]), int(params["v"]), params["span"]
    zfn = height_function(family, params)
    x = (np.arange(u_n) / (u_n - 1) - 0.5) * span
    y = (np.arange(v_n) / (v_n - 1) - 0.5) * span
    gx, gy = np.meshgrid(x, y, indexing="ij")
    gz = np.broadcast_to(zfn(gx, gy), gx.shape)
    return np.stack([gx, gy, gz], axis=-1)


@dataclass
class SurfaceSpec:
    """A sampled reference surface: family, parameters, emitted script."""

    family: str
    params: Mapping[str, float]
    script_text: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.script_text:
            self.script_text = emit_script_text(self.family, self.params)

    @property
    def net(self) -> np.ndarray:
        cached = self.__dict__.get("_net")
        if cached is None:
            cached = make_net(self.family, self.params)
            self.__dict__["_net"] = cached
        return cached


def _num(value: float) -> str:
    """Literal for a script constant: ints stay ints."""
    if float(value) == int(value):
        return str(int(value))
    return repr(float(value))


_NET_LOOP = """\
net = []
for i in range(U):
    u = i/(U-1);  x = (u-0.5)*SPAN
    row = []
    for j in range(V):
        v = j/(V-1);  y = (v-0.5)*SPAN
{body}
        row.append(cq.Vector(x, y, z))
    net.append(row)
"""

_TEMPLATES = {
    "saddle": (
        "U, V, SPAN, CURV = {u}, {v}, {span}, {curv}",
        "        z = CURV*(x**2 - y**2)",
        'surf = cq.Face.makeSplineApprox(net)\n'
        'cq.exporters.export(surf, "saddle.step")',
    ),
    "gaussian": (
        "U, V, SPAN, H = {u}, {v}, {span}, {h}",
        "        r2 = (x**2 + y**2)/((SPAN/3)**2)\n"
        "        z = H * math.exp(-r2)",
        'surf = cq.Face.makeSplineApprox(net).thicken(2).translate((0,0,-1))\n'
        'cq.exporters.export(surf, "gaussian.step")',
    ),
    "wave": (
        "U, V, SPAN, A, WAVELEN = {u}, {v}, {span}, {a}, {wavelength}",
        "        z = A * math.sin(2*math.pi*x/WAVELEN)",
        'surf = cq.Face.makeSplineApprox(net)\n'
        'cq.exporters.export(surf, "wave.step")',
    ),
    "ripple": (
        "U, V, SPAN, A, K, D = {u}, {v}, {span}, {a}, {k}, {d}",
        "        r = math.sqrt(x**2 + y**2)\n"
        "        z = A * math.sin(K*r) * math.exp(-D*r)",
        'surf = cq.Face.makeSplineApprox(net)\n'
        'cq.exporters.export(surf, "ripple.step")',
    ),
}


def emit_script_text(family: str, params: Mapping[str, float]) -> str:
    """Fill the family template; identical inputs give identical bytes."""
    _check_params(family, params)
    constants, z_lines, tail = _TEMPLATES[family]
    values = {k: _num(v) for k, v in params.items()}
    return (
        f"# {family}.py\n"
        "import cadquery as cq, math\n"
        + constants.format(**values) + "\n\n"
        + _NET_LOOP.format(body=z_lines) + "\n"
        + tail + "\n"
    )


def emit_script(spec: SurfaceSpec) -> str:
    return emit_script_text(spec.family, spec.params)


def sample_specs(family: str, count: int, seed: int,
                 overrides: Mapping[str, float] | None = None,
                 ranges: Mapping | None = None) -> list[SurfaceSpec]:
    """Deterministic-under-seed parameter draws for one family."""
    if count < 1:
        raise BadParams("count must be at least 1")
    if family not in FAMILIES:
        raise BadParams(
            f"unknown family {family!r}; valid: {', '.join(FAMILIES)}")
    ranges = ranges or DEFAULT_RANGES
    for scope in ("common", family):
        for name, (lo, hi) in ranges.get(scope, {}).items():
            if hi < lo:
                raise BadParams(f"empty range for {name}")
    rng = random.Random(seed)
    specs = []
    for _ in range(count):
        size = rng.choice(NET_SIZES)
        span = round(rng.uniform(*ranges["common"]["span"]), 3)
        params: dict[str, float] = {"u": size, "v": size, "span": span}
        for name, bounds in ranges[family].items():
            params[name] = round(rng.uniform(*bounds), 6)
        if family == "wave":
            params["wavelength"] = round(rng.uniform(span / 6.0, span / 2.0), 3)
        if overrides:
            params.update(overrides)
        specs.append(SurfaceSpec(family, params))
    return specs


def write_scripts(specs: list[SurfaceSpec], out_dir: str | Path,
                  seed: int) -> list[Path]:
    """One script file per spec plus a JSONL manifest of (family, params)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    with open(out / "surfaces_manifest.jsonl", "a", encoding="utf-8") as mf:
        for index, spec in enumerate(specs):
            path = out / f"{spec.family}_{seed}_{index}.py"
            path.write_text(spec.script_text, encoding="utf-8")
            row = {"file": path.name, "family": spec.family,
                   "params": dict(spec.params)}
            mf.write(json.dumps(row, sort_keys=True) + "\n")
            paths.append(path)
    return paths
