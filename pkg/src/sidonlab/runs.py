"""Algebra on sorted lists of disjoint half-open integer runs.

A run list is a tuple of (start, end) pairs with start < end, sorted by
start, pairwise disjoint and non-adjacent (maximal runs).  All arithmetic
is plain int, so indices may be arbitrarily large.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Iterable, Iterator, Sequence, Tuple

Run = Tuple[int, int]


def normalize(pairs: Iterable[Run]) -> tuple[Run, ...]:
    """Sort, drop empty runs and merge overlapping or adjacent ones."""
    items = sorted((a, b) for a, b in pairs if a < b)
    out: list[Run] = []
    for a, b in items:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return tuple(out)


def is_normal(runs: Sequence[Run]) -> bool:
    if any(a >= b for a, b in runs):
        return False
    return all(runs[i][1] < runs[i + 1][0] for i in range(len(runs) - 1))


def count(runs: Sequence[Run]) -> int:
    return sum(b - a for a, b in runs)


def shift(runs: Sequence[Run], d: int) -> tuple[Run, ...]:
    return tuple((a + d, b + d) for a, b in runs)


def intersect(xs: Sequence[Run], ys: Sequence[Run]) -> tuple[Run, ...]:
    out: list[Run] = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        a = max(xs[i][0], ys[j][0])
        b = min(xs[i][1], ys[j][1])
        if a < b:
            out.append((a, b))
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def union(xs: Sequence[Run], ys: Sequence[Run]) -> tuple[Run, ...]:
    return normalize(list(xs) + list(ys))


def contains(runs: Sequence[Run], x: int) -> bool:
    i = bisect_right(runs, (x, float("inf"))) - 1
    return i >= 0 and runs[i][0] <= x < runs[i][1]


def is_subset(xs: Sequence[Run], ys: Sequence[Run]) -> bool:
    """True when every point of xs lies in ys."""
    j = 0
    for a, b in xs:
        while j < len(ys) and ys[j][1] <= a:
            j += 1
        if j == len(ys) or ys[j][0] > a or ys[j][1] < b:
            return False
    return True


def bounds(runs: Sequence[Run]) -> Run:
    """(min index, max index + 1) of a nonempty run list."""
    assert runs, "empty run list has no bounds"
    return runs[0][0], runs[-1][1]


def iter_points(runs: Sequence[Run]) -> Iterator[int]:
    for a, b in runs:
        yield from range(a, b)


def slice_overlapping(runs: Sequence[Run], lo: int, hi: int) -> tuple[Run, ...]:
    """Runs that intersect the half-open window [lo, hi), untrimmed."""
    starts = [a for a, _ in runs]
    i = bisect_left(starts, lo)
    if i and runs[i - 1][1] > lo:
        i -= 1
    j = bisect_left(starts, hi)
    return tuple(runs[i:j])
