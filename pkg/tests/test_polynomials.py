"""Exact L2 statistics of the averaged shift polynomials.

All values below are hand-derived from the offset tables of the reference
constructions: with r columns the polynomial of a stage has r(r-1) terms
of coefficient 1/r, its square pairs the terms into the diagonal classes,
and every inner product reduces to autocorrelation values 0 or mu/r.
"""

from fractions import Fraction

import pytest

from sidonlab import (
    build_geometry,
    explicit_params,
    power_spacer_params,
    ratio_spacer_params,
)
from sidonlab.polynomials import (
    DegeneratePolynomialError,
    OperatorPolynomial,
    block_average,
    correlation_form,
    exponent_collisions,
    poly_functional,
    poly_norm_sq,
    q_plus_poly,
    q_poly,
    rigidity_deficit,
    theorem41_report,
)

REF1 = power_spacer_params(1, 3, 10, 3)
REF2 = ratio_spacer_params(1, 4, 20, 10, 5)

F = Fraction


# polynomial algebra


def test_from_items_merges_and_drops():
    p = OperatorPolynomial.from_items([(3, F(1, 2)), (3, F(1, 2)), (0, F(0))])
    assert p.terms == ((3, F(1)),)
    assert p.coefficient_sum() == 1


def test_identity_scale_add_sub():
    one = OperatorPolynomial.identity()
    p = OperatorPolynomial.from_items([(1, F(2)), (-1, F(2))])
    assert p.add(one).coefficients() == {1: F(2), -1: F(2), 0: F(1)}
    assert p.sub(p).terms == ()
    assert p.scale(F(1, 2)).coefficients() == {1: F(1), -1: F(1)}


def test_substitute_power():
    p = OperatorPolynomial.from_items([(2, F(1)), (-3, F(1, 2))])
    assert p.substitute_power(5).coefficients() == {10: F(1), -15: F(1, 2)}
    with pytest.raises(ValueError):
        p.substitute_power(0)


def test_q_poly_ref1_terms():
    geom = build_geometry(REF1, 2)
    q = q_poly(geom, 1)
    # offsets 0, 10, 110: ordered differences +-10, +-100, +-110
    assert q.coefficients() == {
        10: F(1, 3), -10: F(1, 3),
        100: F(1, 3), -100: F(1, 3),
        110: F(1, 3), -110: F(1, 3),
    }
    assert q.coefficient_sum() == 2  # r - 1


def test_q_plus_poly_is_half_the_support():
    geom = build_geometry(REF1, 2)
    qp = q_plus_poly(geom, 1)
    assert qp.coefficients() == {10: F(1, 6), 100: F(1, 6), 110: F(1, 6)}
    # Q = Q+ + its reflection, scaled by 2
    q = q_poly(geom, 1)
    refl = OperatorPolynomial.from_items(
        [(-n, c) for n, c in qp.terms]
    )
    assert qp.add(refl).scale(F(2)).coefficients() == q.coefficients()


def test_q_poly_rejects_single_column():
    geom = build_geometry(explicit_params(1, [(1, (5,)), (2, (3, 7))]), 3)
    with pytest.raises(DegeneratePolynomialError):
        q_poly(geom, 1)
    q_poly(geom, 2)  # two columns are enough


def test_exponent_collisions():
    a = OperatorPolynomial.from_items([(3, F(1)), (5, F(1))])
    b = OperatorPolynomial.from_items([(5, F(1)), (7, F(1))])
    assert exponent_collisions([a, b]) == [5]
    assert exponent_collisions([a]) == []


def test_block_average():
    a = OperatorPolynomial.from_items([(1, F(1))])
    b = OperatorPolynomial.from_items([(2, F(1))])
    assert block_average([a, b]).coefficients() == {1: F(1, 2), 2: F(1, 2)}


# exact quadratic statistics on the reference geometries


def test_ref1_stage1_statistics():
    geom = build_geometry(REF1, 4)
    f = geom.tower_set(1)
    q = q_poly(geom, 1)
    # ||Qf||^2 = (r-1)/r + 2(r-1)(r-2)/r^2 with r = 3
    assert poly_norm_sq(geom, q, f) == F(10, 9)
    assert poly_functional(geom, q, f) == F(2, 3)  # 1 - 1/r
    assert poly_norm_sq(geom, q.substitute_power(7), f) == F(2, 3)
    delta = q.sub(OperatorPolynomial.identity(F(2, 3)))
    assert poly_norm_sq(geom, delta, f) == F(2, 3)


def test_rigidity_deficit_matches_expanded_norm():
    geom = build_geometry(REF1, 4)
    f = geom.tower_set(1)
    q = q_poly(geom, 1)
    t = F(2, 3)
    direct = poly_norm_sq(geom, q.sub(OperatorPolynomial.identity(t)), f)
    assert rigidity_deficit(geom, q, f, t) == direct


def test_correlation_form_symmetry():
    geom = build_geometry(REF1, 4)
    f = geom.tower_set(1)
    a = q_poly(geom, 1)
    b = q_poly(geom, 2)
    assert correlation_form(geom, a, b, f) == correlation_form(geom, b, a, f)


def test_theorem41_report_ref2():
    geom = build_geometry(REF2, 6)
    rep = theorem41_report(geom, 0, [2, 3, 5], 4)
    assert rep.f_measure == 1
    assert [b.stage for b in rep.blocks] == [1, 2, 3, 4]
    for b in rep.blocks:
        assert b.r == 4
        assert b.norm_sq == F(3, 2)
        assert b.functional == F(3, 4)
        assert b.delta_norm_sq == F(15, 16)
        assert b.classification_norm_sq == b.norm_sq
        assert b.class_counts == {"A": 12, "B": 24, "C": 24, "D": 84}
        assert all(v == F(3, 4) for v in b.norm_sq_powers.values())
        assert not b.violations
        assert b.large_r_norm_display == F(9, 4)   # 3(r-1)/r
        assert b.large_r_delta_display == F(3, 2)  # 2(1-1/r)
    assert rep.collisions == []
    assert all(v == 0 for v in rep.cross_delta_inner.values())
    assert rep.target_scale == F(3, 4)
    assert rep.avg_norm_sq == F(51, 64)
    assert all(v == F(3, 16) for v in rep.avg_norm_sq_powers.values())
    # with vanishing cross terms the deficit is ||Delta||^2 / m = (15/16)/4
    assert rep.deficit_vs_scale == F(15, 64)
    assert rep.deficit_vs_f == F(19, 64)
    assert rep.power_bound_ok == {2: True, 3: True, 5: True}
    assert rep.rigidity_bound_ok
    assert rep.ok
    assert rep.violation_count() == 0


def test_theorem41_deficit_shrinks_with_block_count():
    geom = build_geometry(REF2, 6)
    reports = [theorem41_report(geom, 0, [2], m) for m in (1, 2, 3, 4)]
    scale = [r.deficit_vs_scale for r in reports]
    plain = [r.deficit_vs_f for r in reports]
    assert scale == [F(15, 16), F(15, 32), F(5, 16), F(15, 64)]
    assert plain == [F(1), F(17, 32), F(3, 8), F(19, 64)]
    assert all(a > b for a, b in zip(scale, scale[1:]))
    assert all(a > b for a, b in zip(plain, plain[1:]))


def test_theorem41_requires_built_stages():
    geom = build_geometry(REF2, 3)
    from sidonlab import ConstructionError

    with pytest.raises(ConstructionError):
        theorem41_report(geom, 0, [2], 4)
