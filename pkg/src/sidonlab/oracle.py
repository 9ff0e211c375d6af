"""Pointwise orbit simulation, independent of the set-algebra engine.

A point is tracked as (stage, level).  One step of the transformation
raises the level by one; from the top level of stage K the point sits in
one of the r_K subcolumns, so a uniform column c is drawn lazily, the
point is re-expressed as stage-(K+1) level k(c, K) + level, and the step
completes there (repeating the ascent while still at a top).  Interior
runs of steps are applied in one jump; the visited states are the same.

Randomness comes from per-sample counter streams (sha256 of seed, stream
and counter), so estimates are reproducible and independent of sample
evaluation order, including under worker pools.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Callable

from . import runs as rn
from .construction import ConstructionError, Geometry, LevelSet


class CounterRng:
    """Deterministic uniform draws from sha256(seed, stream, counter)."""

    __slots__ = ("_prefix", "_counter")

    def __init__(self, seed: int, stream: int):
        self._prefix = b"%d:%d:" % (seed, stream)
        self._counter = 0

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        limit = (1 << 128) - ((1 << 128) % n)
        while True:
            digest = hashlib.sha256(self._prefix + b"%d" % self._counter).digest()
            self._counter += 1
            v = int.from_bytes(digest[:16], "big")
            if v < limit:
                return v % n


@dataclass(frozen=True)
class PointState:
    stage: int
    level: int
    rng_stream: int = 0


def advance(
    geom: Geometry,
    state: PointState,
    steps: int,
    draw_column: Callable[[int], int],
) -> PointState:
    """Apply the transformation `steps` times; draw_column(r) returns 1..r."""
    if steps < 0:
        raise ConstructionError("the simulated map only moves forward")
    stage, level = state.stage, state.level
    if not 0 <= level < geom.height(stage):
        raise ConstructionError("point level outside its stage tower")
    while steps:
        room = geom.height(stage) - 1 - level
        if steps <= room:
            level += steps
            break
        steps -= room + 1
        level = geom.height(stage) - 1
        while level == geom.height(stage) - 1:
            # at the stage top: realize which subcolumn the point is in
            c = draw_column(geom.r(stage))
            level = geom.base_offsets(stage)[c - 1] + level
            stage += 1
        level += 1
    return PointState(stage, level, state.rng_stream)


def successor(geom: Geometry, state: PointState,
              draw_column: Callable[[int], int]) -> PointState:
    return advance(geom, state, 1, draw_column)


@dataclass
class McEstimate:
    d: int
    n_samples: int
    hits: int
    estimate: float
    std_error: float
    hit_fraction: Fraction  # hits / n_samples, exact


def _start_level(f: LevelSet, idx: int) -> int:
    for a, b in f.runs:
        if idx < b - a:
            return a + idx
        idx -= b - a
    raise AssertionError("start index outside the set")


def estimate_autocorrelation(
    geom: Geometry,
    f: LevelSet,
    d: int,
    n_samples: int,
    seed: int,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo mu(T^d f intersect f) from n_samples uniform starts in f."""
    geom.check_set(f)
    if f.is_empty():
        raise ConstructionError("cannot sample from an empty set")
    if n_samples < 1:
        raise ConstructionError("need at least one sample")
    total = f.level_count
    mu = geom.measure(f)

    def count_hits(bounds: tuple[int, int]) -> int:
        lo, hi = bounds
        hits = 0
        for i in range(lo, hi):
            rng = CounterRng(seed, i)
            level = _start_level(f, rng.randbelow(total))
            state = advance(geom, PointState(f.stage, level, i), d, rng_draw(rng))
            target = geom.refine(f, state.stage)
            if rn.contains(target.runs, state.level):
                hits += 1
        return hits

    def rng_draw(rng: CounterRng) -> Callable[[int], int]:
        return lambda r: rng.randbelow(r) + 1

    # pre-refine once so worker threads only read the caches
    probe = CounterRng(seed, 0)
    lvl = _start_level(f, probe.randbelow(total))
    end = advance(geom, PointState(f.stage, lvl, 0), d, rng_draw(probe))
    geom.refine(f, end.stage)

    if threads > 1:
        step = -(-n_samples // threads)
        chunks = [(lo, min(lo + step, n_samples)) for lo in range(0, n_samples, step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(count_hits, chunks))
    else:
        hits = count_hits((0, n_samples))
    p = Fraction(hits, n_samples)
    pf = hits / n_samples
    return McEstimate(
        d=d,
        n_samples=n_samples,
        hits=hits,
        estimate=float(mu * p),
        std_error=float(mu) * sqrt(pf * (1.0 - pf) / n_samples),
        hit_fraction=p,
    )
