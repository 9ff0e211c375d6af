"""Operator polynomials in T and their exact L2 statistics.

For a stage j with r columns at offsets k(1..r), the averaging polynomial
is Q_j(T) = (1/r) sum_{i != i'} T^{k(i)-k(i')}.  All inner products of
polynomial images of an indicator f reduce to autocorrelations:

    (A(T)f, B(T)f) = sum_{n,m} a_n b_m rho_f(n - m),

which the geometry evaluates exactly, so norms, rigidity deficits and the
four-class quadruple analysis of ||Q_j(T)f||^2 are all exact rationals.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .construction import ConstructionError, Geometry, LevelSet


class DegeneratePolynomialError(ConstructionError):
    """Raised for stages with a single column (r_j = 1)."""


@dataclass(frozen=True)
class OperatorPolynomial:
    """Finite sum of coefficient * T^exponent, exponents sorted and unique."""

    terms: tuple[tuple[int, Fraction], ...]

    @classmethod
    def from_items(cls, items: Iterable[tuple[int, Fraction]]) -> "OperatorPolynomial":
        acc: dict[int, Fraction] = {}
        for n, c in items:
            acc[n] = acc.get(n, Fraction(0)) + c
        return cls(tuple(sorted((n, c) for n, c in acc.items() if c != 0)))

    @classmethod
    def identity(cls, scale: Fraction = Fraction(1)) -> "OperatorPolynomial":
        return cls.from_items([(0, scale)])

    def coefficient_sum(self) -> Fraction:
        return sum((c for _, c in self.terms), Fraction(0))

    def coefficients(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def scale(self, c: Fraction) -> "OperatorPolynomial":
        return OperatorPolynomial.from_items((n, c * v) for n, v in self.terms)

    def add(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return OperatorPolynomial.from_items(list(self.terms) + list(other.terms))

    def sub(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self.add(other.scale(Fraction(-1)))

    def substitute_power(self, p: int) -> "OperatorPolynomial":
        """The polynomial evaluated at T^p."""
        if p < 1:
            raise ConstructionError("power substitution needs p >= 1")
        return OperatorPolynomial.from_items((p * n, c) for n, c in self.terms)


def q_poly(geom: Geometry, j: int) -> OperatorPolynomial:
    """Q_j(T) = (1/r_j) sum over ordered column pairs i != i'."""
    r = geom.r(j)
    if r < 2:
        raise DegeneratePolynomialError(
            f"degenerate polynomial: stage {j} has a single column"
        )
    offs = geom.base_offsets(j)
    w = Fraction(1, r)
    return OperatorPolynomial.from_items(
        (offs[i] - offs[i2], w)
        for i in range(r)
        for i2 in range(r)
        if i != i2
    )


def q_plus_poly(geom: Geometry, j: int) -> OperatorPolynomial:
    """Positive-exponent half (1/2r_j) sum over i' < i."""
    r = geom.r(j)
    if r < 2:
        raise DegeneratePolynomialError(
            f"degenerate polynomial: stage {j} has a single column"
        )
    offs = geom.base_offsets(j)
    w = Fraction(1, 2 * r)
    return OperatorPolynomial.from_items(
        (offs[i] - offs[i2], w) for i in range(r) for i2 in range(i)
    )


def exponent_collisions(polys: Sequence[OperatorPolynomial]) -> list[int]:
    """Exponents appearing in more than one summand (support overlap)."""
    seen: Counter[int] = Counter()
    for poly in polys:
        for n, _ in poly.terms:
            seen[n] += 1
    return sorted(n for n, cnt in seen.items() if cnt > 1)


def block_average(polys: Sequence[OperatorPolynomial]) -> OperatorPolynomial:
    """(1/m) (poly_1 + ... + poly_m); colliding exponents are summed."""
    if not polys:
        raise ConstructionError("block average of no polynomials")
    w = Fraction(1, len(polys))
    return OperatorPolynomial.from_items(
        (n, w * c) for poly in polys for n, c in poly.terms
    )


def correlation_form(
    geom: Geometry,
    pa: OperatorPolynomial,
    pb: OperatorPolynomial,
    f: LevelSet,
    power: int = 1,
) -> Fraction:
    """(A(T^power) f, B(T^power) f) as a sum of autocorrelations."""
    total = Fraction(0)
    for n, cn in pa.terms:
        for m, cm in pb.terms:
            total += cn * cm * geom.autocorrelation(f, power * (n - m))
    return total


def poly_norm_sq(geom: Geometry, poly: OperatorPolynomial, f: LevelSet,
                 power: int = 1) -> Fraction:
    val = correlation_form(geom, poly, poly, f, power)
    assert val >= 0, "a squared norm cannot be negative"
    return val


def poly_functional(geom: Geometry, poly: OperatorPolynomial, f: LevelSet,
                    power: int = 1) -> Fraction:
    """(poly(T^power) f, f)."""
    return sum(
        (c * geom.autocorrelation(f, power * n) for n, c in poly.terms),
        Fraction(0),
    )


def rigidity_deficit(
    geom: Geometry,
    poly: OperatorPolynomial,
    f: LevelSet,
    target_scale: Fraction = Fraction(1),
) -> Fraction:
    """||poly(T) f - target_scale * f||^2, exactly."""
    t = Fraction(target_scale)
    return (
        poly_norm_sq(geom, poly, f)
        - 2 * t * poly_functional(geom, poly, f)
        + t * t * geom.measure(f)
    )


@dataclass
class QuadrupleViolation:
    stage: int
    quadruple: tuple[int, int, int, int]  # (i, i2, m, m2), 1-based columns
    exponent: int
    predicted: Fraction
    actual: Fraction


@dataclass
class BlockStats:
    stage: int
    r: int
    norm_sq: Fraction                     # ||Q_l(T) f||^2
    norm_sq_powers: dict[int, Fraction]   # p -> ||Q_l(T^p) f||^2
    functional: Fraction                  # (Q_l f, f)
    delta_norm_sq: Fraction               # ||Q_l f - (1 - 1/r) f||^2
    class_counts: dict[str, int]
    classification_norm_sq: Fraction      # norm predicted by the class table
    large_r_norm_display: Fraction        # 3 (r-1)/r * mu(f)
    large_r_delta_display: Fraction       # 2 (1-1/r) * mu(f)
    violations: list[QuadrupleViolation]


@dataclass
class Theorem41Report:
    start_stage: int
    m_blocks: int
    p_list: tuple[int, ...]
    f_measure: Fraction
    blocks: list[BlockStats]
    cross_delta_inner: dict[tuple[int, int], Fraction]
    collisions: list[int]
    target_scale: Fraction                # mean of (1 - 1/r_l)
    avg_norm_sq: Fraction                 # ||P(T) f||^2
    avg_norm_sq_powers: dict[int, Fraction]
    deficit_vs_scale: Fraction            # ||P(T) f - target_scale f||^2
    deficit_vs_f: Fraction
    power_bound_ok: dict[int, bool]       # ||P(T^p) f||^2 < mu/m
    rigidity_bound_ok: bool               # deficit_vs_scale < 2 mu/m
    ok: bool

    def violation_count(self) -> int:
        return sum(len(b.violations) for b in self.blocks)


def _classify_block(geom: Geometry, l: int, f: LevelSet, mu: Fraction,
                    p_list: Sequence[int]) -> BlockStats:
    r = geom.r(l)
    if r < 2:
        raise DegeneratePolynomialError(
            f"degenerate polynomial: stage {l} has a single column"
        )
    offs = geom.base_offsets(l)
    counts = {"A": 0, "B": 0, "C": 0, "D": 0}
    total = Fraction(0)
    totals_p = {p: Fraction(0) for p in p_list}
    violations: list[QuadrupleViolation] = []
    for i in range(r):
        for i2 in range(r):
            if i == i2:
                continue
            for m in range(r):
                for m2 in range(r):
                    if m == m2:
                        continue
                    if i == m and i2 == m2:
                        cls, predicted = "A", mu
                    elif i == m:
                        cls, predicted = "B", mu / r
                    elif i2 == m2:
                        cls, predicted = "C", mu / r
                    else:
                        cls, predicted = "D", Fraction(0)
                    counts[cls] += 1
                    e = offs[i] - offs[i2] - offs[m] + offs[m2]
                    actual = geom.autocorrelation(f, e)
                    total += actual
                    for p in p_list:
                        totals_p[p] += geom.autocorrelation(f, p * e)
                    if actual != predicted:
                        violations.append(
                            QuadrupleViolation(
                                stage=l,
                                quadruple=(i + 1, i2 + 1, m + 1, m2 + 1),
                                exponent=e,
                                predicted=predicted,
                                actual=actual,
                            )
                        )
    rr = Fraction(1, r * r)
    norm_sq = total * rr
    q = q_poly(geom, l)
    # independent route through the merged-coefficient bilinear form
    assert norm_sq == poly_norm_sq(geom, q, f), "quadruple sum must match the form"
    functional = poly_functional(geom, q, f)
    scale = 1 - Fraction(1, r)
    delta_norm_sq = norm_sq - 2 * scale * functional + scale * scale * mu
    class_norm = rr * (counts["A"] * mu + (counts["B"] + counts["C"]) * mu / r)
    return BlockStats(
        stage=l,
        r=r,
        norm_sq=norm_sq,
        norm_sq_powers={p: totals_p[p] * rr for p in p_list},
        functional=functional,
        delta_norm_sq=delta_norm_sq,
        class_counts=counts,
        classification_norm_sq=class_norm,
        large_r_norm_display=3 * Fraction(r - 1, r) * mu,
        large_r_delta_display=2 * (1 - Fraction(1, r)) * mu,
        violations=violations,
    )


def theorem41_report(
    geom: Geometry,
    j: int,
    p_list: Sequence[int],
    m_blocks: int,
    f: Optional[LevelSet] = None,
) -> Theorem41Report:
    """Exact block statistics for P_j = (Q_{j+1} + ... + Q_{j+m}) / m."""
    if m_blocks < 1:
        raise ConstructionError("need at least one block")
    if f is None:
        f = geom.tower_set(1)
    mu = geom.measure(f)
    stages = list(range(j + 1, j + m_blocks + 1))
    blocks = [_classify_block(geom, l, f, mu, p_list) for l in stages]
    qs = {l: q_poly(geom, l) for l in stages}
    deltas = {
        l: qs[l].sub(OperatorPolynomial.identity(1 - Fraction(1, geom.r(l))))
        for l in stages
    }
    cross = {
        (l1, l2): correlation_form(geom, deltas[l1], deltas[l2], f)
        for a, l1 in enumerate(stages)
        for l2 in stages[a + 1:]
    }
    avg = block_average([qs[l] for l in stages])
    target = sum((1 - Fraction(1, geom.r(l)) for l in stages), Fraction(0)) / m_blocks
    avg_norm = poly_norm_sq(geom, avg, f)
    avg_powers = {p: poly_norm_sq(geom, avg, f, power=p) for p in p_list}
    deficit_scale = rigidity_deficit(geom, avg, f, target)
    deficit_f = rigidity_deficit(geom, avg, f, Fraction(1))
    power_ok = {p: avg_powers[p] < mu / m_blocks for p in p_list}
    rigid_ok = deficit_scale < 2 * mu / m_blocks
    report = Theorem41Report(
        start_stage=j,
        m_blocks=m_blocks,
        p_list=tuple(p_list),
        f_measure=mu,
        blocks=blocks,
        cross_delta_inner=cross,
        collisions=exponent_collisions([qs[l] for l in stages]),
        target_scale=target,
        avg_norm_sq=avg_norm,
        avg_norm_sq_powers=avg_powers,
        deficit_vs_scale=deficit_scale,
        deficit_vs_f=deficit_f,
        power_bound_ok=power_ok,
        rigidity_bound_ok=rigid_ok,
        ok=all(not b.violations for b in blocks)
        and all(power_ok.values())
        and rigid_ok,
    )
    return report
