"""Window analyses: profile, matched differences, mixing and return mass."""

from fractions import Fraction

import pytest

from sidonlab import (
    ConstructionError,
    build_geometry,
    dissipativity_report,
    explicit_params,
    intersection_profile,
    mixing_bound_check,
    power_disjointness_check,
    power_spacer_params,
    ratio_spacer_params,
    sidon_check,
)

REF1 = power_spacer_params(1, 3, 10, 3)
REF2 = ratio_spacer_params(1, 4, 20, 10, 5)
REF3 = ratio_spacer_params(1, 4, 20, 10, 3, r_power=True)

F = Fraction


def test_intersection_profile_ref1():
    geom = build_geometry(REF1, 3)
    f = geom.tower_set(1)
    items = intersection_profile(geom, f, (1, 1110))
    assert items == [(10, F(1, 3)), (100, F(1, 3)), (110, F(1, 3))]
    assert intersection_profile(geom, f, (111, 1109)) == []


# matched-difference structure over one stage window


def test_sidon_check_ref1_stage1():
    geom = build_geometry(REF1, 4)
    rep = sidon_check(geom, 1)
    assert rep.verdict == "sidon"
    assert rep.ok
    assert (rep.m_lo, rep.m_hi) == (2, 1110)
    diffs = {(e.source, e.target): e.matched_diff for e in rep.entries}
    assert diffs == {(1, 2): 10, (2, 3): 100, (1, 3): 110}
    for e in rep.entries:
        assert e.residual_lo == 0 and e.residual_hi == 0
        assert e.next_column == (e.target == e.source + 1)
    flags = {e.matched_diff: e.in_literal_window for e in rep.entries}
    # adjacent-column differences land just past their spacer; the skip
    # difference 110 exceeds s(1) + 2 h and is reported outside the window
    assert flags == {10: True, 100: True, 110: False}


def test_sidon_check_ref1_stage2():
    geom = build_geometry(REF1, 4)
    rep = sidon_check(geom, 2)
    assert rep.ok
    diffs = {(e.source, e.target): e.matched_diff for e in rep.entries}
    assert diffs == {(1, 2): 11100, (2, 3): 111000, (1, 3): 122100}
    h2 = geom.height(2)
    for e in rep.entries:
        assert abs(e.residual_lo) < h2 and abs(e.residual_hi) < h2


def test_sidon_check_window_validation():
    geom = build_geometry(REF1, 4)
    with pytest.raises(ConstructionError):
        sidon_check(geom, 1, (0, 5))
    with pytest.raises(ConstructionError):
        sidon_check(geom, 1, (2, 1111))
    narrower = sidon_check(geom, 1, (50, 150))
    assert {e.matched_diff for e in narrower.entries} == {100, 110}


def test_sidon_check_flags_ambiguous_columns():
    # three columns with equal spacers: offsets 0, 2, 4 repeat difference 2
    geom = build_geometry(explicit_params(1, [(3, (1, 1, 1)), (3, (9, 9, 9))]), 3)
    rep = sidon_check(geom, 1)
    assert not rep.ok
    assert rep.verdict != "sidon"
    assert any("multiple column pairs" in v.reason for v in rep.violations)


def test_mixing_bound_ref1_tight():
    geom = build_geometry(REF1, 4)
    rep = mixing_bound_check(geom, 1, [1, 2])
    assert rep.ok
    assert rep.f_measure == 1
    for st in rep.stages:
        assert st.bound == F(1, 3)
        assert st.max_value == F(1, 3)
        assert st.tight
        assert st.violations == []
    assert rep.stages[0].max_m == 10
    assert rep.stages[1].max_m == 11100
    assert (rep.stages[0].m_lo, rep.stages[0].m_hi) == (1, 1110)


def test_mixing_bound_detects_pileup():
    # equal spacers stack two column pairs on the same difference: the
    # autocorrelation at that difference is 2/3 > 1/3
    geom = build_geometry(explicit_params(1, [(3, (1, 1, 1)), (3, (9, 9, 9))]), 3)
    rep = mixing_bound_check(geom, 1, [1])
    assert not rep.ok
    st = rep.stages[0]
    assert st.max_value == F(2, 3)
    assert st.violations and st.violations[0] == (2, 2)


def test_power_disjointness_ref2_passes():
    geom = build_geometry(REF2, 6)
    for j in (2, 3):
        for p in (2, 3, 5):
            rep = power_disjointness_check(geom, j, p)
            assert rep.ok, (j, p)
            assert rep.violations == []
            assert rep.support  # the window does contain return times


def test_power_disjointness_ref1_fails_at_eleven():
    geom = build_geometry(REF1, 4)
    rep = power_disjointness_check(geom, 1, 11)
    assert not rep.ok
    assert [(v.m, v.rho_m, v.rho_pm) for v in rep.violations] == [
        (10, F(1, 3), F(1, 3))
    ]


def test_power_disjointness_needs_p_at_least_two():
    geom = build_geometry(REF1, 4)
    with pytest.raises(ConstructionError):
        power_disjointness_check(geom, 1, 1)


def test_dissipativity_ref3():
    rep = dissipativity_report(REF3, 1, 3)
    assert rep.ok
    assert rep.f_measure == 1
    assert rep.product_measure == 1
    assert [s.r for s in rep.stages] == [4, 16]
    assert rep.stages[0].column_masses == [F(1, 4)] * 4
    assert rep.stages[1].column_masses == [F(1, 16)] * 16
    assert all(s.mass_identity for s in rep.stages)
    assert all(s.single_column for s in rep.stages)
    assert rep.inv_r_sum == F(5, 16)
    assert rep.inv_r_sum < F(1, 3)
    assert rep.return_mass_bound == F(5, 16)
    assert rep.non_return_lower_bound == F(11, 16)


def test_dissipativity_flags_shared_return_times():
    params = explicit_params(1, [(3, (1, 1, 1)), (3, (9, 9, 9))])
    rep = dissipativity_report(params, 1, 2)
    assert not rep.ok
    assert not rep.stages[0].single_column
    assert rep.stages[0].offending_spans


def test_dissipativity_horizon_validation():
    with pytest.raises(ConstructionError):
        dissipativity_report(REF3, 2, 2)
