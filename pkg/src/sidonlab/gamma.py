"""Thinned constructions over index blocks and disjointness experiments.

Stages are grouped into blocks G_n = {n^2, ..., n^2 + 2n}, which tile the
positive integers.  A gamma set picks block indices; stages of unpicked
blocks turn fictive (one column, spacers filling the height gap), so the
thinned construction keeps the exact heights of the base one.  The prefix
codes of a bit string give an almost-disjoint family of gamma sets: two
strings share exactly the codes of their common prefix.

A disjointness experiment takes one block averaging polynomial, built from
the base offsets, and evaluates it on two thinned constructions that
disagree on that block: near-rigid on the side that kept it, mixing-small
on the side that dropped it, with separated autocorrelation supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .construction import (
    ConstructionError,
    ConstructionParams,
    Geometry,
    LevelSet,
    StageParams,
    build_geometry,
)
from .polynomials import (
    OperatorPolynomial,
    block_average,
    poly_functional,
    poly_norm_sq,
    q_poly,
)
from .profiles import shift_profile


class NonDiscriminatingBlockError(ConstructionError):
    """The two gamma sets agree on the requested block."""


def block_of(j: int) -> int:
    """The n with j in G_n = {n^2, ..., n^2 + 2n}."""
    if j < 1:
        raise ConstructionError("stages are numbered from 1")
    return math.isqrt(j)


def block_members(n: int) -> range:
    if n < 1:
        raise ConstructionError("blocks are numbered from 1")
    return range(n * n, n * n + 2 * n + 1)


@dataclass(frozen=True)
class GammaSet:
    """Block indices coded by the prefixes of a bit string.

    code(b_1 .. b_t) = 2^t + sum_i b_i 2^(t-i), so the binary expansion of a
    member is '1' followed by a prefix of the seed.
    """

    seed_bits: str

    def __post_init__(self) -> None:
        if not self.seed_bits or set(self.seed_bits) - {"0", "1"}:
            raise ConstructionError("seed must be a non-empty string of 0/1")

    @staticmethod
    def code(prefix: str) -> int:
        return int("1" + prefix, 2)

    def elements(self, count: Optional[int] = None) -> tuple[int, ...]:
        n = len(self.seed_bits) if count is None else count
        if n > len(self.seed_bits):
            raise ConstructionError(
                f"only {len(self.seed_bits)} codes available, {n} requested"
            )
        return tuple(self.code(self.seed_bits[:t]) for t in range(1, n + 1))

    def __contains__(self, n: int) -> bool:
        if n < 2:
            return False
        bits = format(n, "b")[1:]
        return len(bits) <= len(self.seed_bits) and self.seed_bits.startswith(bits)


def gamma_from_bits(bits: str) -> GammaSet:
    return GammaSet(bits)


def gamma_params(base: ConstructionParams, gamma: GammaSet, J: int) -> ConstructionParams:
    """Parameters of the thinned construction, stages 1..J.

    Stages of kept blocks copy the base; the others become fictive with the
    single spacer h_{j+1} - h_j, so heights agree with the base at every
    stage by induction.
    """
    if J < 1:
        raise ConstructionError("need at least one stage")
    if len(base.stages) < J:
        raise ConstructionError(
            f"base has {len(base.stages)} stages, {J} needed"
        )
    geom = build_geometry(base, J + 1)
    stages = []
    for j in range(1, J + 1):
        if block_of(j) in gamma:
            stages.append(base.stages[j - 1])
        else:
            stages.append(StageParams(1, (geom.height(j + 1) - geom.height(j),)))
    return ConstructionParams(base.h1, tuple(stages))


@dataclass
class SupportSeparation:
    k_lo: int
    k_hi: int
    rigid_support: list[tuple[int, int]]
    mixing_support: list[tuple[int, int]]
    common_support: list[tuple[int, int]]
    k0: int                    # largest common point, 0 when disjoint
    separated: bool            # no common point in (k0, k_hi]


@dataclass
class DisjointnessReport:
    block: int
    stages: tuple[int, ...]            # n^2 + 1 .. n^2 + n, the averaged half
    rigid_seed: str
    mixing_seed: str
    p_list: tuple[int, ...]
    f_measure: Fraction
    target_scale: Fraction             # mean of (1 - 1/r_l) over the stages
    rigid_norm_sq: Fraction
    rigid_functional: Fraction
    deficit_vs_scale: Fraction
    deficit_vs_f: Fraction
    rigid_norm_powers: dict[int, Fraction]
    mixing_norm_sq: Fraction
    mixing_norm_powers: dict[int, Fraction]
    ordering_ok: bool                  # deficit_vs_scale < mixing_norm_sq
    separation: SupportSeparation

    @property
    def ok(self) -> bool:
        return self.ordering_ok and self.separation.separated


def _sweep_cap(geom: Geometry, f: LevelSet) -> int:
    """Largest shift representable at full depth without more stages."""
    deep = geom.refine(f, geom.depth)
    return geom.height(geom.depth) - deep.max_end()


def disjointness_experiment(
    base: ConstructionParams,
    gamma1: GammaSet,
    gamma2: GammaSet,
    n: int,
    p_list: Sequence[int] = (2, 3),
    k_range: Optional[tuple[int, int]] = None,
) -> DisjointnessReport:
    """Rigidity-versus-mixing witness on block n for two thinned constructions.

    The averaging polynomial P_n = (Q_{n^2+1} + ... + Q_{n^2+n}) / n is built
    once from the base offsets and evaluated on both constructions with
    f the first-stage level.  Requires n in exactly one of the gamma sets.
    """
    in1, in2 = n in gamma1, n in gamma2
    if in1 == in2:
        raise NonDiscriminatingBlockError(
            f"non-discriminating block: {n} is in "
            + ("both gamma sets" if in1 else "neither gamma set")
        )
    rigid_gamma, mixing_gamma = (gamma1, gamma2) if in1 else (gamma2, gamma1)
    J = n * n + 2 * n
    base_geom = build_geometry(base, J + 1)
    stages = tuple(range(n * n + 1, n * n + n + 1))
    polys = [q_poly(base_geom, l) for l in stages]
    avg = block_average(polys)
    target = sum(
        (1 - Fraction(1, base_geom.r(l)) for l in stages), Fraction(0)
    ) / len(stages)

    g_rigid = build_geometry(gamma_params(base, rigid_gamma, J), J + 1)
    g_mix = build_geometry(gamma_params(base, mixing_gamma, J), J + 1)
    f = g_rigid.tower_set(1)
    mu = g_rigid.measure(f)

    rigid_norm = poly_norm_sq(g_rigid, avg, f)
    rigid_func = poly_functional(g_rigid, avg, f)
    deficit_scale = rigid_norm - 2 * target * rigid_func + target * target * mu
    deficit_f = rigid_norm - 2 * rigid_func + mu
    mixing_norm = poly_norm_sq(g_mix, avg, f)

    if k_range is None:
        k_range = (1, min(_sweep_cap(g_rigid, f), _sweep_cap(g_mix, f)) - 1)
    k_lo, k_hi = k_range
    sup_r = shift_profile(g_rigid, f, f, k_lo, k_hi).support()
    sup_m = shift_profile(g_mix, f, f, k_lo, k_hi).support()
    common: list[tuple[int, int]] = []
    ai = bi = 0
    while ai < len(sup_r) and bi < len(sup_m):
        a, b = sup_r[ai], sup_m[bi]
        lo, hi = max(a[0], b[0]), min(a[1], b[1])
        if lo <= hi:
            common.append((lo, hi))
        if a[1] < b[1]:
            ai += 1
        else:
            bi += 1
    k0 = common[-1][1] if common else 0

    return DisjointnessReport(
        block=n,
        stages=stages,
        rigid_seed=rigid_gamma.seed_bits,
        mixing_seed=mixing_gamma.seed_bits,
        p_list=tuple(p_list),
        f_measure=mu,
        target_scale=target,
        rigid_norm_sq=rigid_norm,
        rigid_functional=rigid_func,
        deficit_vs_scale=deficit_scale,
        deficit_vs_f=deficit_f,
        rigid_norm_powers={p: poly_norm_sq(g_rigid, avg, f, power=p) for p in p_list},
        mixing_norm_sq=mixing_norm,
        mixing_norm_powers={p: poly_norm_sq(g_mix, avg, f, power=p) for p in p_list},
        ordering_ok=deficit_scale < mixing_norm,
        separation=SupportSeparation(
            k_lo=k_lo,
            k_hi=k_hi,
            rigid_support=sup_r,
            mixing_support=sup_m,
            common_support=common,
            k0=k0,
            separated=not any(hi > k0 for _, hi in common),
        ),
    )
