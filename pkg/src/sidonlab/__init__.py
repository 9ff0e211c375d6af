"""Exact laboratory for rank-one cutting-and-stacking constructions."""

from .analysis import (
    DissipativityReport,
    MixingReport,
    PowerDisjointReport,
    SidonReport,
    dissipativity_report,
    intersection_profile,
    mixing_bound_check,
    power_disjointness_check,
    sidon_check,
)
from .construction import (
    ConstructionError,
    ConstructionParams,
    Geometry,
    InsufficientDepthError,
    LevelSet,
    StageParams,
    ValidationReport,
    build_geometry,
    explicit_params,
    intersect_sets,
    is_subset,
    power_spacer_params,
    ratio_spacer_params,
    union_sets,
    validate_params,
)
from .gamma import (
    GammaSet,
    NonDiscriminatingBlockError,
    block_of,
    disjointness_experiment,
    gamma_from_bits,
    gamma_params,
)
from .lpshift import (
    LpParameterError,
    LpReport,
    build_v,
    lp_convergence_report,
)
from .oracle import McEstimate, estimate_autocorrelation
from .polynomials import (
    DegeneratePolynomialError,
    OperatorPolynomial,
    Theorem41Report,
    q_poly,
    theorem41_report,
)
from .profiles import ShiftProfile, SweepBudgetError, shift_profile

__all__ = [
    "ConstructionError",
    "ConstructionParams",
    "DegeneratePolynomialError",
    "DissipativityReport",
    "GammaSet",
    "Geometry",
    "InsufficientDepthError",
    "LevelSet",
    "LpParameterError",
    "LpReport",
    "McEstimate",
    "MixingReport",
    "NonDiscriminatingBlockError",
    "OperatorPolynomial",
    "PowerDisjointReport",
    "ShiftProfile",
    "SidonReport",
    "StageParams",
    "SweepBudgetError",
    "Theorem41Report",
    "ValidationReport",
    "block_of",
    "build_geometry",
    "build_v",
    "disjointness_experiment",
    "dissipativity_report",
    "estimate_autocorrelation",
    "explicit_params",
    "gamma_from_bits",
    "gamma_params",
    "intersect_sets",
    "intersection_profile",
    "is_subset",
    "lp_convergence_report",
    "mixing_bound_check",
    "power_disjointness_check",
    "power_spacer_params",
    "q_poly",
    "ratio_spacer_params",
    "shift_profile",
    "sidon_check",
    "theorem41_report",
    "union_sets",
    "validate_params",
]
