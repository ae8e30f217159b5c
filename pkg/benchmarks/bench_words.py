#!/usr/bin/env python3
"""Benchmark the word kernels and the operations built on them.

Compares the compiled kernel (``loopcalc._wordcore``) against the pure
Python twin on raw canonicalization, then times a bracket/cobracket
workload through each backend.  Run after an editable install:

    python3 benchmarks/bench_words.py [--words N] [--pairs N]
"""

from __future__ import annotations

import argparse
import random
import time


def bench_raw(impl, words) -> float:
    start = time.perf_counter()
    for w in words:
        impl.canonical(w)
    return time.perf_counter() - start


def bench_operations(pairs: int, seed: int) -> float:
    from loopcalc import stars as starcalc
    from loopcalc.fuzz import random_loop_pair
    from loopcalc.surface import canonical_surface

    surf, _ = canonical_surface(2, 1)
    rng = random.Random(seed)
    start = time.perf_counter()
    for _ in range(pairs):
        a, b = random_loop_pair(surf, rng, 12)
        loops = {"a": a, "b": b}
        starcalc.aggregate(surf, loops, "bracket", method="gate")
        starcalc.aggregate(surf, {"a": a}, "cobracket", method="gate")
    return time.perf_counter() - start


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--words", type=int, default=200_000)
    parser.add_argument("--pairs", type=int, default=300)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    from loopcalc import _wordpure

    try:
        from loopcalc import _wordcore
    except ImportError:
        _wordcore = None

    rng = random.Random(args.seed)
    words = [
        [rng.randrange(16) for _ in range(rng.randrange(4, 60))] for _ in range(args.words)
    ]

    pure = bench_raw(_wordpure, words)
    print(f"canonicalize {args.words} words, pure python : {pure:.3f}s")
    if _wordcore is not None:
        compiled = bench_raw(_wordcore, words)
        print(f"canonicalize {args.words} words, compiled    : {compiled:.3f}s")
        print(f"speedup: {pure / compiled:.1f}x")
    else:
        print("compiled kernel not available; skipping comparison")

    import os
    import subprocess
    import sys

    # The backend is chosen at import time, so time the operation workload
    # in subprocesses with the selector pinned each way.
    for backend in ("cython", "pure"):
        env = dict(os.environ, LOOPCALC_WORD_BACKEND=backend)
        code = (
            "import sys; sys.path.insert(0, 'benchmarks');"
            f"from bench_words import bench_operations;"
            f"print(bench_operations({args.pairs}, {args.seed}))"
        )
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        if out.returncode == 0:
            seconds = float(out.stdout.strip().splitlines()[-1])
            print(
                f"gate-route bracket+cobracket, {args.pairs} pairs, "
                f"{backend:6s}: {seconds:.3f}s"
            )
        else:
            print(f"{backend} workload failed: {out.stderr.strip()}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
