"""The randomized harness itself: generators produce valid data, reports
are deterministic, and a sabotaged evaluator is caught."""

import doctest
import random

from loopcalc import _wordpure
from loopcalc.fuzz import (
    random_loop,
    random_loop_pair,
    random_move,
    run_fuzz,
    surface_from_spec,
)
from loopcalc.loops import apply_move, validate_loop, LoopError
from loopcalc.surface import canonical_surface


def test_wordpure_doctests():
    failed, attempted = doctest.testmod(_wordpure)
    assert attempted > 0
    assert failed == 0


def test_random_loops_are_valid():
    rng = random.Random(0)
    for spec in ("g0b2", "g0b3", "g1b1", "g2b1"):
        surf, _ = surface_from_spec(spec)
        for _ in range(25):
            loop = random_loop(surf, rng, 12)
            assert validate_loop(surf, loop).valid
            assert len(loop.transits) <= 12


def test_random_pairs_jointly_generic():
    surf, _ = canonical_surface(1, 1)
    rng = random.Random(1)
    for _ in range(25):
        a, b = random_loop_pair(surf, rng, 10)
        points = [(t.star, t.edge, t.pos) for t in a.transits + b.transits]
        assert len(points) == len(set(points))


def test_random_moves_apply_cleanly():
    surf, _ = canonical_surface(0, 3)
    rng = random.Random(2)
    loop = random_loop(surf, rng, 8)
    applied = 0
    for _ in range(60):
        move = random_move(surf, loop, rng)
        try:
            loop = apply_move(surf, loop, move)
            applied += 1
        except LoopError:
            continue
    assert applied >= 50
    assert validate_loop(surf, loop).valid


def test_run_fuzz_clean_and_deterministic():
    first = run_fuzz("g0b3", pairs=8, moves=10, seed=5)
    second = run_fuzz("g0b3", pairs=8, moves=10, seed=5)
    assert first.ok
    assert first.to_json() == second.to_json()
    assert first.checks["oracle"] == 8


def test_run_fuzz_catches_injected_bug():
    report = run_fuzz("g1b1", pairs=4, seed=1, inject_bug=True)
    assert not report.ok
    payload = report.to_json()
    assert payload["counterexample"]["check"] == "oracle"
    assert payload["counterexample"]["loops"]["a"]
