"""The event-sweep shift profile against pointwise exact intersections."""

import random
from fractions import Fraction

import pytest

from sidonlab import build_geometry, power_spacer_params, ratio_spacer_params
from sidonlab.profiles import (
    SweepBudgetError,
    column_containment_sweep,
    shift_profile,
)

REF1 = power_spacer_params(1, 3, 10, 3)
REF2 = ratio_spacer_params(1, 4, 20, 10, 5)


def test_profile_matches_pointwise_everywhere_ref1():
    geom = build_geometry(REF1, 3)
    f = geom.tower_set(1)
    prof = shift_profile(geom, f, f, 1, geom.height(2))
    for m in range(1, geom.height(2) + 1):
        assert prof.value(m) == geom.measure_intersection(f, f, m)


def test_profile_matches_pointwise_sampled_ref2():
    geom = build_geometry(REF2, 4)
    f = geom.tower_set(2)
    lo, hi = geom.height(2), geom.height(3)
    prof = shift_profile(geom, f, f, lo, hi)
    rng = random.Random(3)
    # support edges are where errors would hide; sample them plus random m
    edges = []
    for a, b in prof.support()[:40]:
        edges += [a, b, max(lo, a - 1), min(hi, b + 1)]
    for m in edges + [rng.randrange(lo, hi + 1) for _ in range(120)]:
        assert prof.value(m) == geom.autocorrelation(f, m)


def test_profile_support_and_items_agree():
    geom = build_geometry(REF1, 3)
    f = geom.tower_set(1)
    prof = shift_profile(geom, f, f, 1, geom.height(2))
    items = prof.items()
    assert items == [(10, Fraction(1, 3)), (100, Fraction(1, 3)), (110, Fraction(1, 3))]
    assert prof.support() == [(10, 10), (100, 100), (110, 110)]
    assert prof.support_size() == 3
    assert prof.max_measure() == (10, Fraction(1, 3))


def test_profile_outside_window_rejected():
    geom = build_geometry(REF1, 3)
    f = geom.tower_set(1)
    prof = shift_profile(geom, f, f, 1, geom.height(2))
    with pytest.raises(ValueError):
        prof.value(0)


def test_intervals_above():
    geom = build_geometry(REF2, 3)
    f = geom.tower_set(1)
    prof = shift_profile(geom, f, f, 1, geom.height(2))
    # bound 1/4 holds: nothing sticks out; bound 1/5 is exceeded at offsets
    assert prof.intervals_above(Fraction(1, 4)) == []
    above = prof.intervals_above(Fraction(1, 5))
    assert (21, 21) in above
    for a, b in above:
        for m in range(a, b + 1):
            assert prof.value(m) > Fraction(1, 5)


def test_items_budget():
    geom = build_geometry(REF2, 4)
    f = geom.tower_set(2)
    prof = shift_profile(geom, f, f, geom.height(2), geom.height(3))
    with pytest.raises(SweepBudgetError):
        prof.items(cap=2)


def test_trapezoid_shape_of_wide_source():
    # f is the stage-2 tower; against a single stage-1 copy the overlap
    # ramps up one level per step, plateaus, and ramps down: check corners
    geom = build_geometry(REF1, 4)
    f = geom.tower_set(2)
    prof = shift_profile(geom, f, f, 1, geom.height(3))
    mu = geom.level_measure(3)
    # columns 1 and 2 of stage 2 sit 11100 apart: full overlap at the peak,
    # one level lost per step off it
    assert prof.value(11100) == 1110 * mu
    assert prof.value(11100 - 1) == 1109 * mu
    assert prof.value(11100 + 1) == 1109 * mu
    assert geom.autocorrelation(f, 11100) == prof.value(11100)


def test_column_containment_sweep_ref1():
    geom = build_geometry(REF1, 3)
    f = geom.tower_set(1)
    spans = column_containment_sweep(geom, f, 1, 2, geom.height(2))
    got = {(s.m_lo, s.m_hi): s.pairs for s in spans}
    assert got == {
        (10, 10): frozenset({(1, 2)}),
        (100, 100): frozenset({(2, 3)}),
        (110, 110): frozenset({(1, 3)}),
    }
    assert all(s.single_column for s in spans)
    assert spans[0].target_columns == frozenset({2})


def test_column_containment_sweep_covers_profile_support():
    geom = build_geometry(REF2, 4)
    f = geom.tower_set(2)
    lo, hi = geom.height(2), geom.height(3) - 1
    spans = column_containment_sweep(geom, f, 2, lo, hi)
    prof = shift_profile(geom, f, f, lo, hi)
    span_points = set()
    for s in spans:
        span_points.add((s.m_lo, s.m_hi))
    support = [seg for seg in prof.support()]
    assert span_points == set(support)
