"""Rank-one cutting-and-stacking constructions with exact arithmetic.

A construction is given by the base tower height h1 and, per stage j, the
cut count r_j and spacer vector s_j(1..r_j).  Stage j+1 stacks the r_j
subcolumns of stage j left to right, inserting s_j(i) spacer levels above
subcolumn i, so

    h_{j+1} = h_j * r_j + sum_i s_j(i)

and subcolumn i starts at level offset

    k(1, j) = 0,    k(i+1, j) = k(i, j) + h_j + s_j(i).

Levels of stage j all have the same measure 1 / (r_1 * ... * r_{j-1}),
normalized so the stage-1 tower has measure h1.  Measurable sets are kept
as unions of whole levels of some stage (LevelSet) and every quantity is
an exact fractions.Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import runs as rn


class ConstructionError(ValueError):
    """Malformed parameters or an operation outside the built geometry."""


class InsufficientDepthError(ConstructionError):
    """An operation needs stages beyond the built depth."""

    def __init__(self, needed_stage: int, depth: int):
        self.needed_stage = needed_stage
        self.depth = depth
        super().__init__(
            f"insufficient geometry depth: need stage {needed_stage}, built {depth}"
        )


@dataclass(frozen=True)
class StageParams:
    """Cut count and spacer vector of one stage transition."""

    r: int
    spacers: tuple[int, ...]

    def total_spacers(self) -> int:
        return sum(self.spacers)


@dataclass(frozen=True)
class ConstructionParams:
    h1: int
    stages: tuple[StageParams, ...]


def explicit_params(h1: int, stages: Iterable[tuple[int, Sequence[int]]]) -> ConstructionParams:
    return ConstructionParams(
        h1=h1,
        stages=tuple(StageParams(r=r, spacers=tuple(s)) for r, s in stages),
    )


def power_spacer_params(h1: int, r: int, base: int, n_stages: int) -> ConstructionParams:
    """Spacers s_j(i) = base^i * h_j - h_j (pure power-of-base gaps)."""
    if base < 2:
        raise ConstructionError("power spacer base must be >= 2")
    stages = []
    h = h1
    for _ in range(n_stages):
        spacers = tuple(base**i * h - h for i in range(1, r + 1))
        stages.append(StageParams(r=r, spacers=spacers))
        h = h * r + sum(spacers)
    return ConstructionParams(h1=h1, stages=tuple(stages))


def ratio_spacer_params(
    h1: int,
    r: int,
    psi0: int,
    psi_step: int,
    n_stages: int,
    r_power: bool = False,
) -> ConstructionParams:
    """Spacers s_j(i) = psi_j^i * h_j with psi_j = psi0 + psi_step*(j-1).

    With r_power the cut count grows as r^j instead of staying constant.
    """
    stages = []
    h = h1
    for j in range(1, n_stages + 1):
        rj = r**j if r_power else r
        psi = psi0 + psi_step * (j - 1)
        spacers = tuple(psi**i * h for i in range(1, rj + 1))
        stages.append(StageParams(r=rj, spacers=spacers))
        h = h * rj + sum(spacers)
    return ConstructionParams(h1=h1, stages=tuple(stages))


@dataclass
class ValidationIssue:
    stage: Optional[int]
    message: str


@dataclass
class ValidationReport:
    well_formed: bool
    issues: list[ValidationIssue]
    heights: list[int]
    infinite_measure_partial_sums: list[Fraction]
    separation_schedule: list[Optional[Fraction]]
    sidon_psi: Optional[Fraction]
    zero_spacer_stages: list[int]


def _stage_psi(h: int, spacers: tuple[int, ...]) -> Optional[Fraction]:
    # sup of psi with s(1) > psi*h and s(i+1) > psi*s(i); None when no psi > 0 works
    if spacers[0] <= 0:
        return None
    cands = [Fraction(spacers[0], h)]
    for prev, nxt in zip(spacers, spacers[1:]):
        if prev == 0:
            if nxt == 0:
                return None
            continue
        cands.append(Fraction(nxt, prev))
    return min(cands)


def validate_params(params: ConstructionParams) -> ValidationReport:
    """Shape checks plus the infinite-measure and separation diagnostics."""
    issues: list[ValidationIssue] = []
    if params.h1 < 1:
        issues.append(ValidationIssue(None, f"h1 must be >= 1, got {params.h1}"))
    if not params.stages:
        issues.append(ValidationIssue(None, "at least one stage is required"))
    for j, st in enumerate(params.stages, start=1):
        if st.r < 1:
            issues.append(ValidationIssue(j, f"stage {j}: r must be >= 1, got {st.r}"))
        if len(st.spacers) != st.r:
            issues.append(
                ValidationIssue(
                    j,
                    f"stage {j}: spacer vector has length {len(st.spacers)}, expected r = {st.r}",
                )
            )
        if any(s < 0 for s in st.spacers):
            issues.append(ValidationIssue(j, f"stage {j}: spacers must be >= 0"))
    if issues:
        return ValidationReport(False, issues, [], [], [], None, [])

    heights = [params.h1]
    partial_sums: list[Fraction] = []
    schedule: list[Optional[Fraction]] = []
    zero_stages: list[int] = []
    acc = Fraction(0)
    for j, st in enumerate(params.stages, start=1):
        h = heights[-1]
        acc += Fraction(st.total_spacers(), h * st.r)
        partial_sums.append(acc)
        schedule.append(_stage_psi(h, st.spacers))
        if st.total_spacers() == 0:
            zero_stages.append(j)
        heights.append(h * st.r + st.total_spacers())
    psis = [p for p in schedule]
    sidon_psi = None if any(p is None for p in psis) else min(psis)
    return ValidationReport(
        well_formed=True,
        issues=[],
        heights=heights,
        infinite_measure_partial_sums=partial_sums,
        separation_schedule=schedule,
        sidon_psi=sidon_psi,
        zero_spacer_stages=zero_stages,
    )


@dataclass(frozen=True)
class LevelSet:
    """Union of whole levels of one stage, as maximal half-open runs."""

    stage: int
    runs: tuple[tuple[int, int], ...]

    @classmethod
    def from_runs(cls, stage: int, pairs: Iterable[tuple[int, int]]) -> "LevelSet":
        return cls(stage=stage, runs=rn.normalize(pairs))

    @property
    def level_count(self) -> int:
        return rn.count(self.runs)

    def is_empty(self) -> bool:
        return not self.runs

    def max_end(self) -> int:
        return self.runs[-1][1] if self.runs else 0


def intersect_sets(a: LevelSet, b: LevelSet) -> LevelSet:
    if a.stage != b.stage:
        raise ConstructionError("set intersection requires a common stage")
    return LevelSet(a.stage, rn.intersect(a.runs, b.runs))


def union_sets(a: LevelSet, b: LevelSet) -> LevelSet:
    if a.stage != b.stage:
        raise ConstructionError("set union requires a common stage")
    return LevelSet(a.stage, rn.union(a.runs, b.runs))


def is_subset(a: LevelSet, b: LevelSet) -> bool:
    if a.stage != b.stage:
        raise ConstructionError("subset test requires a common stage")
    return rn.is_subset(a.runs, b.runs)


class Geometry:
    """Heights, column offsets and level measures of the first `depth` stages.

    Holds heights h_1..h_depth and offsets k(i, j) for j < depth, so sets
    can be refined down to stage `depth`.  Also memoizes refinements and
    autocorrelation values; the caches are plain dicts, safe under the
    usual concurrent-read / atomic-insert discipline.
    """

    def __init__(self, params: ConstructionParams, depth: int):
        report = validate_params(params)
        if not report.well_formed:
            first = report.issues[0]
            raise ConstructionError(f"invalid construction parameters: {first.message}")
        if depth < 1 or depth > len(params.stages) + 1:
            raise InsufficientDepthError(depth, len(params.stages) + 1)
        self.params = params
        self.depth = depth
        self.validation = report
        self._heights = report.heights[:depth]
        self._measures = [Fraction(1)]
        self._bases: list[tuple[int, ...]] = []
        for j in range(1, depth):
            st = params.stages[j - 1]
            h = self._heights[j - 1]
            offs = [0]
            for i in range(1, st.r):
                offs.append(offs[-1] + h + st.spacers[i - 1])
            self._bases.append(tuple(offs))
            self._measures.append(self._measures[-1] / st.r)
        self._refine_cache: dict[tuple[LevelSet, int], LevelSet] = {}
        self._rho_cache: dict[tuple[LevelSet, int], Fraction] = {}

    # -- stage data ----------------------------------------------------

    def height(self, j: int) -> int:
        self._check_stage(j)
        return self._heights[j - 1]

    def r(self, j: int) -> int:
        self._check_transition(j)
        return self.params.stages[j - 1].r

    def spacers(self, j: int) -> tuple[int, ...]:
        self._check_transition(j)
        return self.params.stages[j - 1].spacers

    def base_offsets(self, j: int) -> tuple[int, ...]:
        """Column start offsets k(i, j), i = 1..r_j, inside stage j+1."""
        self._check_transition(j)
        return self._bases[j - 1]

    def level_measure(self, j: int) -> Fraction:
        self._check_stage(j)
        return self._measures[j - 1]

    def _check_stage(self, j: int) -> None:
        if not 1 <= j <= self.depth:
            raise InsufficientDepthError(j, self.depth)

    def _check_transition(self, j: int) -> None:
        if not 1 <= j <= self.depth - 1:
            raise InsufficientDepthError(j + 1, self.depth)

    # -- canonical sets ------------------------------------------------

    def tower_set(self, j: int) -> LevelSet:
        """X_j: every level of the stage-j tower."""
        self._check_stage(j)
        return LevelSet(j, ((0, self._heights[j - 1]),))

    def column_set(self, i: int, j: int) -> LevelSet:
        """X_{i,j}: subcolumn i of stage j, as levels of stage j+1."""
        self._check_transition(j)
        if not 1 <= i <= self.r(j):
            raise ConstructionError(f"column index {i} outside 1..{self.r(j)}")
        k = self._bases[j - 1][i - 1]
        return LevelSet(j + 1, ((k, k + self._heights[j - 1]),))

    def check_set(self, ls: LevelSet) -> None:
        self._check_stage(ls.stage)
        if ls.runs and not (0 <= ls.runs[0][0] and ls.max_end() <= self.height(ls.stage)):
            raise ConstructionError("level set exceeds its stage height")

    # -- set operations ------------------------------------------------

    def refine(self, ls: LevelSet, to_stage: int) -> LevelSet:
        """Re-express a set by levels of a later stage; measure is unchanged."""
        self._check_stage(to_stage)
        if to_stage < ls.stage:
            raise ConstructionError("cannot refine to an earlier stage")
        cur = ls
        while cur.stage < to_stage:
            key = (cur, cur.stage + 1)
            nxt = self._refine_cache.get(key)
            if nxt is None:
                offs = self.base_offsets(cur.stage)
                nxt = LevelSet.from_runs(
                    cur.stage + 1,
                    ((a + k, b + k) for a, b in cur.runs for k in offs),
                )
                self._refine_cache[key] = nxt
            cur = nxt
        return cur

    def measure(self, ls: LevelSet) -> Fraction:
        self.check_set(ls)
        return ls.level_count * self._measures[ls.stage - 1]

    def with_headroom(self, ls: LevelSet, d: int) -> LevelSet:
        """Refine until a forward shift by d stays below the stage top."""
        if d < 0:
            raise ConstructionError("headroom is defined for d >= 0")
        cur = ls
        if cur.is_empty():
            return cur
        while cur.max_end() + d > self.height(cur.stage):
            if cur.stage + 1 > self.depth:
                raise InsufficientDepthError(cur.stage + 1, self.depth)
            cur = self.refine(cur, cur.stage + 1)
        return cur

    def shift_set(self, ls: LevelSet, d: int) -> LevelSet:
        """T^d applied to a set, d >= 0 (refines as needed)."""
        cur = self.with_headroom(ls, d)
        return LevelSet(cur.stage, rn.shift(cur.runs, d))

    def measure_intersection(self, a: LevelSet, b: LevelSet, d: int) -> Fraction:
        """mu(T^d a  intersect  b), for any integer d."""
        self.check_set(a)
        self.check_set(b)
        if d < 0:
            return self.measure_intersection(b, a, -d)
        if a.is_empty() or b.is_empty():
            return Fraction(0)
        sa = self.with_headroom(a, d)
        stage = max(sa.stage, b.stage)
        sa = self.refine(sa, stage)
        # refining the already shifted set would be wrong; shift after refining
        sb = self.refine(b, stage)
        hit = rn.intersect(rn.shift(sa.runs, d), sb.runs)
        return rn.count(hit) * self._measures[stage - 1]

    def autocorrelation(self, f: LevelSet, d: int) -> Fraction:
        """rho_f(d) = mu(T^d f intersect f); symmetric in d, cached on |d|."""
        key = (f, abs(d))
        val = self._rho_cache.get(key)
        if val is None:
            val = self.measure_intersection(f, f, abs(d))
            self._rho_cache[key] = val
        return val


def build_geometry(params: ConstructionParams, depth: int) -> Geometry:
    """Validate parameters and materialize stages 1..depth."""
    return Geometry(params, depth)
