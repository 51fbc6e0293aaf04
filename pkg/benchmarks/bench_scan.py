#!/usr/bin/env python3
"""Token-scanner benchmark: compiled extension vs pure-Python fallback.

Corpus analysis is dominated by tokenizing STEP text, so this is the one
hot loop in the package. Run from the repo root:

    python benchmarks/bench_scan.py [--repeat N] [--scale N]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from cadaug.step import _scan_py

try:
    from cadaug.step import _scan_c
except ImportError:
    _scan_c = None

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus"


def load_corpus(scale: int) -> list[str]:
    texts = [p.read_text(encoding="utf-8")
             for p in sorted(FIXTURES.glob("*.step"))]
    return texts * scale


def bench(scan, texts: list[str], repeat: int) -> tuple[float, int]:
    tokens = 0
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        tokens = sum(len(scan(text)) for text in texts)
        best = min(best, time.perf_counter() - started)
    return best, tokens


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--scale", type=int, default=20,
                        help="duplicate the corpus N times")
    args = parser.parse_args()

    texts = load_corpus(args.scale)
    total_bytes = sum(len(t) for t in texts)
    print(f"corpus: {len(texts)} documents, {total_bytes / 1e6:.1f} MB")

    py_time, py_tokens = bench(_scan_py.scan, texts, args.repeat)
    print(f"pure-python : {py_time:.3f}s  "
          f"({total_bytes / py_time / 1e6:.1f} MB/s, {py_tokens} tokens)")

    if _scan_c is None:
        print("compiled    : not built")
        return 0

    c_time, c_tokens = bench(_scan_c.scan, texts, args.repeat)
    print(f"compiled    : {c_time:.3f}s  "
          f"({total_bytes / c_time / 1e6:.1f} MB/s, {c_tokens} tokens)")
    if c_tokens != py_tokens:
        print("TOKEN COUNT MISMATCH between implementations")
        return 1
    print(f"speedup     : {py_time / c_time:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
