"""Exact sweep engine for mu(T^m A intersect B) over integer windows.

Each pair of runs ((a1,b1) in A, (a2,b2) in B) contributes a trapezoid to
the coincidence count as a function of the shift m, supported on
[a2-b1+1, b2-a1-1] with plateau min(len1, len2).  Summing second
differences of all window-relevant trapezoids gives the full profile as a
piecewise-linear integer function, so sweeps over every integer m in a
window cost O(pairs log pairs) instead of O(window width).  Measures are
counts times the level measure of the sweep stage, hence exact.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import runs as rn
from .construction import ConstructionError, Geometry, LevelSet, intersect_sets


class SweepBudgetError(ConstructionError):
    """Materializing a profile would exceed the caller's point budget."""


@dataclass(frozen=True)
class Segment:
    """count(m) = value_lo + slope * (m - m_lo) for m in [m_lo, m_hi]."""

    m_lo: int
    m_hi: int
    value_lo: int
    slope: int

    def value_at(self, m: int) -> int:
        assert self.m_lo <= m <= self.m_hi
        return self.value_lo + self.slope * (m - self.m_lo)

    @property
    def value_hi(self) -> int:
        return self.value_at(self.m_hi)


def _window_pairs(
    a_runs: Sequence[tuple[int, int]],
    b_runs: Sequence[tuple[int, int]],
    lo: int,
    hi: int,
) -> Iterable[tuple[int, int, int, int]]:
    """Run pairs whose shift support [a2-b1+1, b2-a1-1] meets [lo, hi]."""
    b_starts = [a for a, _ in b_runs]
    b_ends = [b for _, b in b_runs]
    for a1, b1 in a_runs:
        j0 = bisect_left(b_ends, a1 + lo + 1)
        j1 = bisect_left(b_starts, b1 + hi)
        for a2, b2 in b_runs[j0:j1]:
            yield a1, b1, a2, b2


class ShiftProfile:
    """Piecewise-linear coincidence counts over one shift window."""

    def __init__(self, stage: int, level_measure: Fraction, lo: int, hi: int,
                 segments: list[Segment]):
        self.stage = stage
        self.level_measure = level_measure
        self.lo = lo
        self.hi = hi
        self.segments = segments  # clipped to window, positive values only

    def support(self) -> list[tuple[int, int]]:
        """Maximal inclusive integer intervals with positive measure."""
        out: list[tuple[int, int]] = []
        for seg in self.segments:
            if out and seg.m_lo <= out[-1][1] + 1:
                out[-1] = (out[-1][0], max(out[-1][1], seg.m_hi))
            else:
                out.append((seg.m_lo, seg.m_hi))
        return out

    def support_size(self) -> int:
        return sum(b - a + 1 for a, b in self.support())

    def max_measure(self) -> tuple[Optional[int], Fraction]:
        """(smallest argmax m, maximum measure) over the window."""
        best_m: Optional[int] = None
        best = 0
        for seg in self.segments:
            for m, v in ((seg.m_lo, seg.value_lo), (seg.m_hi, seg.value_hi)):
                if v > best or (v == best and best_m is not None and m < best_m):
                    best, best_m = v, m
        if best_m is None:
            return None, Fraction(0)
        return best_m, best * self.level_measure

    def value(self, m: int) -> Fraction:
        if not self.lo <= m <= self.hi:
            raise ConstructionError(f"shift {m} outside swept window [{self.lo}, {self.hi}]")
        i = bisect_left(self.segments, m, key=lambda s: s.m_hi)
        if i < len(self.segments) and self.segments[i].m_lo <= m:
            return self.segments[i].value_at(m) * self.level_measure
        return Fraction(0)

    def items(self, cap: int = 1_000_000) -> list[tuple[int, Fraction]]:
        """Every (m, measure) with positive measure, ascending in m."""
        if self.support_size() > cap:
            raise SweepBudgetError(
                f"profile has {self.support_size()} nonzero shifts, budget {cap}"
            )
        out: list[tuple[int, Fraction]] = []
        for seg in self.segments:
            for m in range(seg.m_lo, seg.m_hi + 1):
                out.append((m, seg.value_at(m) * self.level_measure))
        return out

    def intervals_above(self, bound: Fraction) -> list[tuple[int, int]]:
        """Maximal inclusive m-intervals where the measure exceeds `bound`."""
        out: list[tuple[int, int]] = []
        for seg in self.segments:
            lo, hi = None, None
            # solve value_lo + slope*(m - m_lo) > bound / level_measure exactly
            thr = bound / self.level_measure
            if seg.slope == 0:
                if seg.value_lo > thr:
                    lo, hi = seg.m_lo, seg.m_hi
            else:
                # m beyond (thr - value_lo)/slope + m_lo, direction by sign
                cut = Fraction(thr - seg.value_lo, seg.slope) + seg.m_lo
                if seg.slope > 0:
                    start = max(seg.m_lo, _floor_frac(cut) + 1)
                    if start <= seg.m_hi:
                        lo, hi = start, seg.m_hi
                else:
                    end = min(seg.m_hi, _ceil_frac(cut) - 1)
                    if end >= seg.m_lo:
                        lo, hi = seg.m_lo, end
            if lo is not None:
                if out and lo <= out[-1][1] + 1:
                    out[-1] = (out[-1][0], max(out[-1][1], hi))
                else:
                    out.append((lo, hi))
        return out


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _sweep_stage(geom: Geometry, a: LevelSet, b: LevelSet, hi: int) -> int:
    """Common stage where a forward shift of A by hi cannot leave the tower."""
    stage = max(a.stage, b.stage)
    cur = geom.refine(a, stage)
    while not cur.is_empty() and cur.max_end() + hi > geom.height(stage):
        stage += 1
        cur = geom.refine(a, stage)  # raises InsufficientDepthError past depth
    return stage


def shift_profile(geom: Geometry, a: LevelSet, b: LevelSet, lo: int, hi: int) -> ShiftProfile:
    """Exact profile of mu(T^m a intersect b) for every integer m in [lo, hi]."""
    if lo < 0 or lo > hi:
        raise ConstructionError(f"invalid shift window [{lo}, {hi}]")
    geom.check_set(a)
    geom.check_set(b)
    if a.is_empty() or b.is_empty():
        return ShiftProfile(max(a.stage, b.stage), Fraction(0), lo, hi, [])
    stage = _sweep_stage(geom, a, b, hi)
    ra = geom.refine(a, stage).runs
    rb = geom.refine(b, stage).runs
    deltas: Counter[int] = Counter()
    for a1, b1, a2, b2 in _window_pairs(ra, rb, lo, hi):
        peak_lo = min(a2 - a1, b2 - b1)
        peak_hi = max(a2 - a1, b2 - b1)
        deltas[a2 - b1 + 1] += 1
        deltas[peak_lo + 1] -= 1
        deltas[peak_hi + 1] -= 1
        deltas[b2 - a1 + 1] += 1
    segments: list[Segment] = []
    pos = sorted(deltas)
    slope = 0
    val = 0  # count at cur - 1
    cur = pos[0] if pos else lo
    for p in pos:
        if p > cur:
            _clip_segment(segments, cur, p - 1, val + slope, slope, lo, hi)
            val += slope * (p - cur)
            cur = p
        slope += deltas[p]
    assert slope == 0 and val == 0, "trapezoid events must close"
    return ShiftProfile(stage, geom.level_measure(stage), lo, hi, segments)


def _clip_segment(segments: list[Segment], m_lo: int, m_hi: int, value_lo: int,
                  slope: int, lo: int, hi: int) -> None:
    a = max(m_lo, lo)
    b = min(m_hi, hi)
    if a > b:
        return
    v = value_lo + slope * (a - m_lo)
    # keep only the strictly positive part; counts are integers, so >= 1
    if slope > 0 and v < 1:
        step = -((v - 1) // slope)
        a += step
        v += slope * step
    elif slope < 0 and v >= 1:
        b = min(b, a + (v - 1) // -slope)
    if v < 1 or a > b:
        return
    segments.append(Segment(a, b, v, slope))


@dataclass(frozen=True)
class ColumnSpan:
    """One maximal m-interval with a fixed set of contributing column pairs.

    `pairs` holds (source column, target column) indices of stage j; the
    intersection T^m f intersect f lies in the target columns.
    """

    m_lo: int
    m_hi: int
    pairs: frozenset[tuple[int, int]]

    @property
    def target_columns(self) -> frozenset[int]:
        return frozenset(t for _, t in self.pairs)

    @property
    def single_column(self) -> bool:
        return len(self.target_columns) == 1


def column_containment_sweep(geom: Geometry, f: LevelSet, j: int,
                             lo: int, hi: int) -> list[ColumnSpan]:
    """Column bookkeeping for T^m f intersect f over every m in [lo, hi].

    Splits f over the stage-j columns and reports, for each maximal
    m-interval with nonempty intersection, which (source, target) column
    pairs contribute.  f must be covered by the stage-j tower.
    """
    if lo < 0 or lo > hi:
        raise ConstructionError(f"invalid shift window [{lo}, {hi}]")
    fj = geom.refine(f, j + 1)
    parts: list[tuple[int, LevelSet]] = []
    covered = 0
    for i in range(1, geom.r(j) + 1):
        part = intersect_sets(fj, geom.column_set(i, j))
        if not part.is_empty():
            parts.append((i, part))
            covered += part.level_count
    if covered != fj.level_count:
        raise ConstructionError("set is not covered by the stage-j columns")
    stage = _sweep_stage(geom, fj, fj, hi)
    tagged = [(col, geom.refine(part, stage).runs) for col, part in parts]
    events: list[tuple[int, int, int, int]] = []
    for src, ra in tagged:
        for tgt, rb in tagged:
            for a1, b1, a2, b2 in _window_pairs(ra, rb, lo, hi):
                m0 = max(a2 - b1 + 1, lo)
                m1 = min(b2 - a1 - 1, hi)
                if m0 <= m1:
                    events.append((m0, 1, src, tgt))
                    events.append((m1 + 1, -1, src, tgt))
    events.sort()
    spans: list[ColumnSpan] = []
    active: Counter[tuple[int, int]] = Counter()
    i = 0
    prev_pos: Optional[int] = None
    while i < len(events):
        pos = events[i][0]
        if active and prev_pos is not None:
            spans.append(ColumnSpan(prev_pos, pos - 1, frozenset(active)))
        while i < len(events) and events[i][0] == pos:
            _, delta, src, tgt = events[i]
            active[(src, tgt)] += delta
            if active[(src, tgt)] == 0:
                del active[(src, tgt)]
            i += 1
        prev_pos = pos
    assert not active, "containment events must close"
    # merge adjacent spans with identical pair sets
    merged: list[ColumnSpan] = []
    for span in spans:
        if merged and merged[-1].m_hi + 1 == span.m_lo and merged[-1].pairs == span.pairs:
            merged[-1] = ColumnSpan(merged[-1].m_lo, span.m_hi, span.pairs)
        else:
            merged.append(span)
    return merged
