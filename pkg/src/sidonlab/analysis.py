"""Sidon structure checks: single-column containment, mixing bounds,
power disjointness and the dissipativity ledger.

Everything here is an exact report over integer shift windows.  The sweeps
are exhaustive in the sense that every integer m in the window is accounted
for; the profile engine works on maximal segments, so cost scales with the
number of contributing run pairs, not with the window width.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .construction import (
    ConstructionError,
    ConstructionParams,
    Geometry,
    LevelSet,
    build_geometry,
    intersect_sets,
)
from .profiles import ColumnSpan, SweepBudgetError, column_containment_sweep, shift_profile


def intersection_profile(
    geom: Geometry, f: LevelSet, m_range: tuple[int, int], cap: int = 1_000_000
) -> list[tuple[int, Fraction]]:
    """All (m, mu(T^m f intersect f)) with positive measure, m in the range."""
    lo, hi = m_range
    prof = shift_profile(geom, f, f, lo, hi)
    return prof.items(cap)


@dataclass
class SidonEntry:
    m_lo: int
    m_hi: int
    source: int
    target: int
    matched_diff: int          # k(target, j) - k(source, j)
    residual_lo: int           # m_lo - matched_diff
    residual_hi: int
    next_column: bool          # target == source + 1
    in_literal_window: bool    # s_j(source) < m < s_j(source) + 2 h_j throughout


@dataclass
class SidonViolation:
    m_lo: int
    m_hi: int
    pairs: tuple[tuple[int, int], ...]
    reason: str


@dataclass
class SidonReport:
    stage: int
    m_lo: int
    m_hi: int
    entries: list[SidonEntry]
    violations: list[SidonViolation]
    verdict: str               # "sidon" iff no violations

    @property
    def ok(self) -> bool:
        return self.verdict == "sidon"


def sidon_check(
    geom: Geometry,
    j: int,
    m_range: Optional[tuple[int, int]] = None,
    f: Optional[LevelSet] = None,
) -> SidonReport:
    """Single-column containment of T^m f intersect f over m in (h_j, h_{j+1}].

    For every maximal m-interval with nonempty intersection the report names
    the unique (source, target) column pair, the matched base difference and
    the residual, which must stay below h_j.  Multiple active pairs at one m
    break the verdict.  The literal next-column window (s_j(i), s_j(i)+2h_j)
    is recorded as informational only: multi-column jumps land outside it
    while still meeting the single-column property.
    """
    h_j = geom.height(j)
    h_next = geom.height(j + 1)
    if m_range is None:
        m_range = (h_j + 1, h_next)
    lo, hi = m_range
    if lo <= h_j or hi > h_next or lo > hi:
        raise ConstructionError(
            f"sidon window [{lo}, {hi}] must sit inside ({h_j}, {h_next}]"
        )
    if f is None:
        f = geom.tower_set(j)
    spans = column_containment_sweep(geom, f, j, lo, hi)
    offs = geom.base_offsets(j)
    spacers = geom.spacers(j)
    entries: list[SidonEntry] = []
    violations: list[SidonViolation] = []
    for span in spans:
        if len(span.pairs) != 1:
            violations.append(
                SidonViolation(span.m_lo, span.m_hi, tuple(sorted(span.pairs)),
                               "multiple column pairs")
            )
            continue
        ((src, tgt),) = span.pairs
        diff = offs[tgt - 1] - offs[src - 1]
        res_lo = span.m_lo - diff
        res_hi = span.m_hi - diff
        if max(abs(res_lo), abs(res_hi)) >= h_j:
            violations.append(
                SidonViolation(span.m_lo, span.m_hi, ((src, tgt),),
                               f"residual {max(abs(res_lo), abs(res_hi))} >= h_j")
            )
            continue
        literal = False
        if tgt == src + 1:
            s = spacers[src - 1]
            literal = s < span.m_lo and span.m_hi < s + 2 * h_j
        entries.append(
            SidonEntry(span.m_lo, span.m_hi, src, tgt, diff, res_lo, res_hi,
                       tgt == src + 1, literal)
        )
    return SidonReport(
        stage=j,
        m_lo=lo,
        m_hi=hi,
        entries=entries,
        violations=violations,
        verdict="sidon" if not violations else "multiple",
    )


@dataclass
class MixingStage:
    stage: int
    m_lo: int
    m_hi: int
    bound: Fraction            # mu(X_p) / r_j
    max_m: Optional[int]
    max_value: Fraction
    tight: bool                # max_value == bound
    violations: list[tuple[int, int]]


@dataclass
class MixingReport:
    base_stage: int
    f_measure: Fraction
    stages: list[MixingStage]

    @property
    def ok(self) -> bool:
        return all(not s.violations for s in self.stages)


def mixing_bound_check(geom: Geometry, p: int, j_range: Iterable[int]) -> MixingReport:
    """mu(X_p intersect T^m X_p) <= mu(X_p)/r_j for every m in [h_j, h_{j+1}]."""
    f = geom.tower_set(p)
    mu = geom.measure(f)
    stages: list[MixingStage] = []
    for j in j_range:
        lo, hi = geom.height(j), geom.height(j + 1)
        bound = mu / geom.r(j)
        prof = shift_profile(geom, f, f, lo, hi)
        top = prof.max_measure()
        max_m, max_val = (None, Fraction(0)) if top is None else top
        stages.append(
            MixingStage(
                stage=j,
                m_lo=lo,
                m_hi=hi,
                bound=bound,
                max_m=max_m,
                max_value=max_val,
                tight=max_val == bound,
                violations=prof.intervals_above(bound),
            )
        )
    return MixingReport(base_stage=p, f_measure=mu, stages=stages)


@dataclass
class PowerViolation:
    m: int
    rho_m: Fraction
    rho_pm: Fraction


@dataclass
class PowerDisjointReport:
    stage: int
    power: int
    m_lo: int
    m_hi: int
    support: list[tuple[int, int]]
    violations: list[PowerViolation]

    @property
    def ok(self) -> bool:
        return not self.violations


def power_disjointness_check(
    geom: Geometry,
    j: int,
    p: int,
    m_range: Optional[tuple[int, int]] = None,
    f: Optional[LevelSet] = None,
    cap: int = 100_000,
) -> PowerDisjointReport:
    """rho_f(m) > 0 with m > h_j must force rho_f(p m) = 0.

    The base window is swept once; each maximal support interval is dilated
    by p and swept again, so a violation is an integer point of the support
    whose dilate meets the dilated support.  Every violating m is listed.
    """
    if p < 2:
        raise ConstructionError("power disjointness needs p >= 2")
    if m_range is None:
        m_range = (geom.height(j) + 1, geom.height(j + 1))
    lo, hi = m_range
    if lo <= geom.height(j):
        raise ConstructionError(f"window must start above h_j = {geom.height(j)}")
    if f is None:
        f = geom.tower_set(j)
    base = shift_profile(geom, f, f, lo, hi)
    support = base.support()
    violations: list[PowerViolation] = []
    for a, b in support:
        dil = shift_profile(geom, f, f, p * a, p * b)
        for g, d in dil.support():
            m0 = max(a, -(-g // p))
            m1 = min(b, d // p)
            if m1 - m0 + 1 > cap:
                raise SweepBudgetError(
                    f"violation range [{m0}, {m1}] exceeds the cap {cap}"
                )
            for m in range(m0, m1 + 1):
                violations.append(PowerViolation(m, base.value(m), dil.value(p * m)))
    violations.sort(key=lambda v: v.m)
    return PowerDisjointReport(
        stage=j, power=p, m_lo=lo, m_hi=hi, support=support, violations=violations
    )


@dataclass
class DissipativityStage:
    stage: int
    r: int
    single_column: bool
    offending_spans: list[ColumnSpan]
    column_masses: list[Fraction]
    mass_identity: bool        # sum of squares times r_j equals mu(X_p)^2
    return_bound_term: Fraction

    @property
    def ok(self) -> bool:
        return self.single_column and self.mass_identity


@dataclass
class DissipativityReport:
    base_stage: int
    horizon: int
    f_measure: Fraction
    product_measure: Fraction          # mu-bar of the product square C_p
    stages: list[DissipativityStage]
    inv_r_sum: Fraction
    return_mass_bound: Fraction        # product_measure * inv_r_sum
    non_return_lower_bound: Fraction   # product_measure * (1 - inv_r_sum)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.stages)


def dissipativity_report(
    params: ConstructionParams, p: int, horizon: int, depth: Optional[int] = None
) -> DissipativityReport:
    """Return-mass ledger for the product square C_p over stages [p, horizon).

    The product transformation is never materialized.  For each stage the
    report verifies that every return time h in [h_j, h_{j+1}) meets a single
    column pair, and that the stage-j columns split X_p evenly, which bounds
    the product return mass by mu(X_p)^2 / r_j.  Accumulating the bounds
    yields the non-return (wandering) mass lower bound.
    """
    if horizon <= p:
        raise ConstructionError("horizon must exceed the base stage")
    if depth is None:
        depth = horizon + 1
    geom = build_geometry(params, depth)
    f = geom.tower_set(p)
    mu = geom.measure(f)
    mubar = mu * mu
    stages: list[DissipativityStage] = []
    inv_sum = Fraction(0)
    for j in range(p, horizon):
        spans = column_containment_sweep(
            geom, f, j, geom.height(j), geom.height(j + 1) - 1
        )
        offending = [s for s in spans if len(s.pairs) != 1]
        r = geom.r(j)
        fj = geom.refine(f, j + 1)
        masses = [
            geom.measure(intersect_sets(fj, geom.column_set(i, j)))
            for i in range(1, r + 1)
        ]
        assert sum(masses) == mu, "columns must exhaust the set"
        identity = sum(m * m for m in masses) * r == mubar
        inv_sum += Fraction(1, r)
        stages.append(
            DissipativityStage(
                stage=j,
                r=r,
                single_column=not offending,
                offending_spans=offending,
                column_masses=masses,
                mass_identity=identity,
                return_bound_term=mubar / r,
            )
        )
    return DissipativityReport(
        base_stage=p,
        horizon=horizon,
        f_measure=mu,
        product_measure=mubar,
        stages=stages,
        inv_r_sum=inv_sum,
        return_mass_bound=mubar * inv_sum,
        non_return_lower_bound=mubar * (1 - inv_sum),
    )
