"""Coordinate shift on l_p of the integers and its rigidity witness vector.

The vector v carries the value 2^-j at q(j) = floor(2^(c j)) positions
-10^n, blocks of n in increasing j, with 2 < c < p.  The block polynomial
Q_j(S) sums the shifts S^(10^n) over block j, and R_j = q(j)^-1 2^j Q_j
sends v to e_0 plus an error whose p-norm decays geometrically.

Positions of the error terms are 10^k - 10^n with k != n, and the pair
(k, n) is readable off the decimal digits, so distinct pairs give distinct
positions.  That makes every p-norm here a finite sum of rational p-th
powers, computable from the schedule alone; materializing vectors is only
needed (and only feasible) for small truncations, which is what the tests
use to validate the closed forms.  p must be an integer so the p-th powers
stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union


class LpParameterError(ValueError):
    """Rejected schedule or vector parameters."""


RationalLike = Union[Fraction, int, str, float]


def as_fraction(x: RationalLike) -> Fraction:
    # str goes through Fraction("5/2") or Fraction("2.5"); float is exact binary
    return Fraction(x)


def integer_root(x: int, k: int) -> int:
    """floor(x ** (1/k)) for nonnegative integer x, integer k >= 1."""
    if x < 0 or k < 1:
        raise LpParameterError("integer_root needs x >= 0, k >= 1")
    if k == 1 or x == 0:
        return x
    if k == 2:
        return math.isqrt(x)
    r = 1 << -(-x.bit_length() // k)  # upper bound: 2^ceil(bits/k) >= x^(1/k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    assert r ** k <= x < (r + 1) ** k
    return r


@dataclass(frozen=True)
class LpBlockSchedule:
    """Block sizes q(j), value assignment and boundaries for a truncation."""

    c: Fraction
    p: int
    sizes: tuple[int, ...]

    @classmethod
    def build(cls, c: RationalLike, p: int, j_max: int) -> "LpBlockSchedule":
        c = as_fraction(c)
        if p != int(p):
            raise LpParameterError("p must be an integer for exact p-th powers")
        p = int(p)
        if not 2 < c < p:
            raise LpParameterError(f"need 2 < c < p, got c={c}, p={p}")
        if j_max < 1:
            raise LpParameterError("need at least one block")
        sizes = tuple(
            integer_root(2 ** (j * c.numerator), c.denominator)
            for j in range(1, j_max + 1)
        )
        return cls(c=c, p=p, sizes=sizes)

    @property
    def j_max(self) -> int:
        return len(self.sizes)

    def q(self, j: int) -> int:
        if not 1 <= j <= self.j_max:
            raise LpParameterError(f"block {j} outside truncation 1..{self.j_max}")
        return self.sizes[j - 1]

    def cum(self, j: int) -> int:
        """Number of positions in blocks 1..j."""
        return sum(self.sizes[:j])

    def positions(self, j: int) -> range:
        """The n with v(-10^n) = 2^-j."""
        self.q(j)
        return range(self.cum(j - 1) + 1, self.cum(j) + 1)

    def boundary_exponent(self, j: int) -> int:
        """h_j = 10^boundary_exponent(j); block j holds 10^n in [h_j, h_{j+1})."""
        return 1 + self.cum(j - 1)

    def value(self, j: int) -> Fraction:
        return Fraction(1, 2 ** j)

    def v_norm_pow(self) -> Fraction:
        """Truncated norm sum of q(j) 2^(-p j)."""
        return sum(
            (Fraction(q, 2 ** (self.p * j)) for j, q in enumerate(self.sizes, 1)),
            Fraction(0),
        )


@dataclass
class SparseVector:
    p: int
    entries: dict[int, Fraction]

    @classmethod
    def from_items(cls, p: int, items: Iterable[tuple[int, Fraction]]) -> "SparseVector":
        acc: dict[int, Fraction] = {}
        for i, val in items:
            acc[i] = acc.get(i, Fraction(0)) + val
        return cls(p, {i: v for i, v in acc.items() if v != 0})

    def get(self, i: int) -> Fraction:
        return self.entries.get(i, Fraction(0))

    def support_size(self) -> int:
        return len(self.entries)

    def shift(self, k: int) -> "SparseVector":
        """S^k: (S^k w)(i) = w(i - k)."""
        return SparseVector(self.p, {i + k: v for i, v in self.entries.items()})

    def scale(self, c: Fraction) -> "SparseVector":
        c = as_fraction(c)
        if c == 0:
            return SparseVector(self.p, {})
        return SparseVector(self.p, {i: c * v for i, v in self.entries.items()})

    def add(self, other: "SparseVector") -> "SparseVector":
        if self.p != other.p:
            raise LpParameterError("mixed p exponents")
        return SparseVector.from_items(
            self.p, list(self.entries.items()) + list(other.entries.items())
        )

    def sub(self, other: "SparseVector") -> "SparseVector":
        return self.add(other.scale(Fraction(-1)))

    def norm_pow(self) -> Fraction:
        """Exact sum of |entry|^p."""
        return sum((abs(v) ** self.p for v in self.entries.values()), Fraction(0))


def unit_vector(p: int, i: int = 0) -> SparseVector:
    return SparseVector(p, {i: Fraction(1)})


def build_v(
    c: RationalLike, p: int, j_max: int, max_positions: int = 20_000
) -> SparseVector:
    """Materialized truncation of v to blocks 1..j_max."""
    schedule = LpBlockSchedule.build(c, p, j_max)
    return materialize_v(schedule, max_positions)


def materialize_v(schedule: LpBlockSchedule, max_positions: int = 20_000) -> SparseVector:
    total = schedule.cum(schedule.j_max)
    if total > max_positions:
        # positions are -10^n with n up to `total`: the integers themselves
        # outgrow memory long before the entry count does
        raise LpParameterError(
            f"truncation holds {total} positions with up to {total} digits each; "
            f"raise max_positions above {total} to force materialization"
        )
    entries = {}
    for j in range(1, schedule.j_max + 1):
        val = schedule.value(j)
        for n in schedule.positions(j):
            entries[-(10 ** n)] = val
    return SparseVector(schedule.p, entries)


def apply_shift_poly(
    exponents: Sequence[int], coeff: RationalLike, vec: SparseVector
) -> SparseVector:
    """coeff times the sum of S^e vec over e in exponents, collisions summed."""
    coeff = as_fraction(coeff)
    return SparseVector.from_items(
        vec.p,
        ((i + e, coeff * v) for e in exponents for i, v in vec.entries.items()),
    )


def q_exponents(schedule: LpBlockSchedule, j: int) -> list[int]:
    """Shift exponents 10^n of block j."""
    return [10 ** n for n in schedule.positions(j)]


def q_poly_apply(schedule: LpBlockSchedule, j: int, vec: SparseVector) -> SparseVector:
    return apply_shift_poly(q_exponents(schedule, j), Fraction(1), vec)


def r_poly_apply(schedule: LpBlockSchedule, j: int, vec: SparseVector) -> SparseVector:
    """R_j(S) vec = q(j)^-1 2^j Q_j(S) vec."""
    return q_poly_apply(schedule, j, vec).scale(Fraction(2 ** j, schedule.q(j)))


@dataclass
class LpBlockRow:
    j: int
    q: int
    boundary_exponent: int
    zero_value: Fraction          # (R_j v)(0), exactly 1
    delta_norm_pow: Fraction      # ||Q_j v - q 2^-j e_0||_p^p
    bound_pow: Fraction           # q(j) ||v||_p^p
    bound_ok: bool
    deviation_pow: Fraction       # ||R_j v - e_0||_p^p
    deviation: float              # p-th root, display only
    log2_deviation: float
    display_chain_value: float    # q^-1 2^(j - c j / p) ||v||_p as displayed
    display_chain_holds: bool     # whether it actually dominates the deviation


@dataclass
class LpReport:
    c: Fraction
    p: int
    j_max: int
    v_norm_pow: Fraction
    rows: list[LpBlockRow]
    slopes: list[float]           # successive differences of log2 deviation
    mean_slope: float
    asymptotic_slope: float       # 1 - c (1 - 1/p)
    strictly_decreasing: bool
    display_chain_consistent: bool

    @property
    def ok(self) -> bool:
        return (
            all(r.zero_value == 1 and r.bound_ok for r in self.rows)
            and self.strictly_decreasing
        )


def lp_convergence_report(c: RationalLike, p: int, j_max: int) -> LpReport:
    """Exact per-block deviation table from the schedule closed forms.

    Works for truncations far beyond what materialize_v can hold: the error
    positions 10^k - 10^n are pairwise distinct, so every norm is a schedule
    sum.  The displayed comparison chain value is reported alongside because
    it fails to dominate the true deviation; only the decay itself matters.
    """
    schedule = LpBlockSchedule.build(c, p, j_max)
    big_v = schedule.v_norm_pow()
    v_norm = float(big_v) ** (1 / p)
    rows: list[LpBlockRow] = []
    for j in range(1, j_max + 1):
        q = schedule.q(j)
        # each of the q shifted copies contributes every v entry except its
        # own self-hit at zero, all at distinct positions
        delta_pow = q * (big_v - Fraction(1, 2 ** (p * j)))
        dev_pow = Fraction(2 ** (j * p), q ** (p - 1)) * (big_v - Fraction(1, 2 ** (p * j)))
        deviation = float(dev_pow) ** (1 / p)
        display = (2.0 ** (j - float(schedule.c) * j / p)) / q * v_norm
        rows.append(
            LpBlockRow(
                j=j,
                q=q,
                boundary_exponent=schedule.boundary_exponent(j),
                zero_value=Fraction(2 ** j, q) * q * schedule.value(j),
                delta_norm_pow=delta_pow,
                bound_pow=q * big_v,
                bound_ok=delta_pow <= q * big_v,
                deviation_pow=dev_pow,
                deviation=deviation,
                log2_deviation=math.log2(deviation),
                display_chain_value=display,
                display_chain_holds=deviation <= display,
            )
        )
    slopes = [
        rows[i + 1].log2_deviation - rows[i].log2_deviation
        for i in range(len(rows) - 1)
    ]
    return LpReport(
        c=schedule.c,
        p=schedule.p,
        j_max=j_max,
        v_norm_pow=big_v,
        rows=rows,
        slopes=slopes,
        mean_slope=sum(slopes) / len(slopes) if slopes else 0.0,
        asymptotic_slope=float(1 - schedule.c * (1 - Fraction(1, p))),
        strictly_decreasing=all(
            rows[i].deviation_pow > rows[i + 1].deviation_pow
            for i in range(len(rows) - 1)
        ),
        display_chain_consistent=all(r.display_chain_holds for r in rows),
    )
