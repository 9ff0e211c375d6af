"""Command line front end.

One subcommand per analysis; every run takes a TOML config naming the
construction and the command settings, writes one deterministic document
(CSV or JSON) to --out or stdout, and signals through the exit code:
0 all checked properties hold, 2 unusable config or I/O trouble,
3 a checked property was violated (details are in the output).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional

from . import config as cfgmod
from .analysis import (
    dissipativity_report,
    intersection_profile,
    mixing_bound_check,
    power_disjointness_check,
    sidon_check,
)
from .config import ConfigError, RunConfig, load_config
from .construction import ConstructionError, build_geometry, validate_params
from .gamma import disjointness_experiment, gamma_from_bits, gamma_params
from .lpshift import LpParameterError, lp_convergence_report
from .oracle import CounterRng, estimate_autocorrelation
from .polynomials import theorem41_report
from .profiles import SweepBudgetError
from .reports import csv_text, report_text

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VIOLATION = 3


def _cmd_build(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    rep = validate_params(cfg.params)
    body: dict = {
        "h1": cfg.params.h1,
        "depth": cfg.depth,
        "well_formed": rep.well_formed,
        "issues": [
            {"stage": i.stage, "message": i.message} for i in rep.issues
        ],
    }
    if not rep.well_formed:
        return False, report_text("build", body)
    geom = build_geometry(cfg.params, cfg.depth)
    body.update(
        heights=[geom.height(j) for j in range(1, cfg.depth + 1)],
        stages=[
            {
                "stage": j,
                "r": geom.r(j),
                "spacers": list(geom.spacers(j)),
                "base_offsets": list(geom.base_offsets(j)),
                "level_measure_next": geom.level_measure(j + 1),
            }
            for j in range(1, cfg.depth)
        ],
        separation_schedule=[
            None if psi is None else psi for psi in rep.separation_schedule
        ],
        sidon_psi=rep.sidon_psi,
        infinite_measure_partial_sums=rep.infinite_measure_partial_sums,
        zero_spacer_stages=rep.zero_spacer_stages,
    )
    return True, report_text("build", body)


def _cmd_autocorr(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    f_stage, m_lo, m_hi = cfgmod.autocorr_settings(cfg)
    geom = build_geometry(cfg.params, cfg.depth)
    f = geom.tower_set(f_stage)
    items = intersection_profile(geom, f, (m_lo, m_hi))
    rows = [(m, val, float(val)) for m, val in items]
    return True, csv_text("autocorr", ["m", "rho", "rho_float"], rows)


def _cmd_sidon(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    stage, window = cfgmod.sidon_settings(cfg)
    geom = build_geometry(cfg.params, cfg.depth)
    rep = sidon_check(geom, stage, window)
    body = {
        "stage": rep.stage,
        "m_lo": rep.m_lo,
        "m_hi": rep.m_hi,
        "verdict": rep.verdict,
        "entries": [
            {
                "m_lo": e.m_lo,
                "m_hi": e.m_hi,
                "source": e.source,
                "target": e.target,
                "matched_diff": e.matched_diff,
                "residual_lo": e.residual_lo,
                "residual_hi": e.residual_hi,
                "next_column": e.next_column,
                "in_literal_window": e.in_literal_window,
            }
            for e in rep.entries
        ],
        "violations": [
            {"m_lo": v.m_lo, "m_hi": v.m_hi,
             "pairs": [list(p) for p in v.pairs], "reason": v.reason}
            for v in rep.violations
        ],
    }
    return rep.ok, report_text("sidon-check", body)


def _cmd_mixing(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    base_stage, stages = cfgmod.mixing_settings(cfg)
    geom = build_geometry(cfg.params, cfg.depth)
    rep = mixing_bound_check(geom, base_stage, stages)
    body = {
        "base_stage": rep.base_stage,
        "f_measure": rep.f_measure,
        "stages": [
            {
                "stage": s.stage,
                "m_lo": s.m_lo,
                "m_hi": s.m_hi,
                "bound": s.bound,
                "max_m": s.max_m,
                "max_value": s.max_value,
                "tight": s.tight,
                "violations": [{"m_lo": a, "m_hi": b} for a, b in s.violations],
            }
            for s in rep.stages
        ],
        "ok": rep.ok,
    }
    return rep.ok, report_text("mixing-bound", body)


def _cmd_power(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    stage, p, window = cfgmod.power_settings(cfg)
    geom = build_geometry(cfg.params, cfg.depth)
    rep = power_disjointness_check(geom, stage, p, window)
    body = {
        "stage": rep.stage,
        "power": rep.power,
        "m_lo": rep.m_lo,
        "m_hi": rep.m_hi,
        "support": [{"m_lo": a, "m_hi": b} for a, b in rep.support],
        "violations": [
            {"m": v.m, "rho_m": v.rho_m, "rho_pm": v.rho_pm}
            for v in rep.violations
        ],
        "ok": rep.ok,
    }
    return rep.ok, report_text("power-disjoint", body)


def _cmd_dissipativity(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    base_stage, horizon, depth = cfgmod.dissipativity_settings(cfg)
    rep = dissipativity_report(cfg.params, base_stage, horizon, depth)
    body = {
        "base_stage": rep.base_stage,
        "horizon": rep.horizon,
        "f_measure": rep.f_measure,
        "product_measure": rep.product_measure,
        "stages": [
            {
                "stage": s.stage,
                "r": s.r,
                "single_column": s.single_column,
                "mass_identity": s.mass_identity,
                "column_masses": list(s.column_masses),
                "return_bound_term": s.return_bound_term,
                "offending_spans": [
                    {"m_lo": sp.m_lo, "m_hi": sp.m_hi,
                     "pairs": [list(p) for p in sorted(sp.pairs)]}
                    for sp in s.offending_spans
                ],
            }
            for s in rep.stages
        ],
        "inv_r_sum": rep.inv_r_sum,
        "return_mass_bound": rep.return_mass_bound,
        "non_return_lower_bound": rep.non_return_lower_bound,
        "ok": rep.ok,
    }
    return rep.ok, report_text("dissipativity", body)


def _cmd_thm41(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    start, m_blocks, p_list = cfgmod.thm41_settings(cfg)
    geom = build_geometry(cfg.params, cfg.depth)
    rep = theorem41_report(geom, start, p_list, m_blocks)
    body = {
        "start_stage": rep.start_stage,
        "m_blocks": rep.m_blocks,
        "p_list": list(rep.p_list),
        "f_measure": rep.f_measure,
        "blocks": [
            {
                "stage": b.stage,
                "r": b.r,
                "norm_sq": b.norm_sq,
                "norm_sq_powers": {str(p): v for p, v in sorted(b.norm_sq_powers.items())},
                "functional": b.functional,
                "delta_norm_sq": b.delta_norm_sq,
                "class_counts": b.class_counts,
                "classification_norm_sq": b.classification_norm_sq,
                "large_r_norm_display": b.large_r_norm_display,
                "large_r_delta_display": b.large_r_delta_display,
                "violation_count": len(b.violations),
                "violations": [
                    {
                        "quadruple": list(v.quadruple),
                        "exponent": v.exponent,
                        "predicted": v.predicted,
                        "actual": v.actual,
                    }
                    for v in b.violations[:100]
                ],
            }
            for b in rep.blocks
        ],
        "cross_delta_inner": [
            {"stages": [l1, l2], "value": v}
            for (l1, l2), v in sorted(rep.cross_delta_inner.items())
        ],
        "collisions": rep.collisions,
        "target_scale": rep.target_scale,
        "avg_norm_sq": rep.avg_norm_sq,
        "avg_norm_sq_powers": {str(p): v for p, v in sorted(rep.avg_norm_sq_powers.items())},
        "deficit_vs_scale": rep.deficit_vs_scale,
        "deficit_vs_f": rep.deficit_vs_f,
        "power_bound_ok": {str(p): v for p, v in sorted(rep.power_bound_ok.items())},
        "rigidity_bound_ok": rep.rigidity_bound_ok,
        "ok": rep.ok,
    }
    return rep.ok, report_text("thm41", body)


def _cmd_gamma(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    seeds, block, p_list, k_range = cfgmod.gamma_settings(cfg)
    gammas = [gamma_from_bits(s) for s in seeds]
    rep = disjointness_experiment(
        cfg.params, gammas[0], gammas[1], block, p_list, k_range
    )
    J = block * block + 2 * block
    base_geom = build_geometry(cfg.params, J + 1)
    alignment_ok = True
    for g in gammas:
        gg = build_geometry(gamma_params(cfg.params, g, J), J + 1)
        alignment_ok &= all(
            gg.height(j) == base_geom.height(j) for j in range(1, J + 2)
        )
    sep = rep.separation
    ok = rep.ok and alignment_ok
    body = {
        "block": rep.block,
        "stages": list(rep.stages),
        "seeds": seeds,
        "rigid_seed": rep.rigid_seed,
        "mixing_seed": rep.mixing_seed,
        "alignment_ok": alignment_ok,
        "f_measure": rep.f_measure,
        "target_scale": rep.target_scale,
        "rigid_norm_sq": rep.rigid_norm_sq,
        "rigid_functional": rep.rigid_functional,
        "deficit_vs_scale": rep.deficit_vs_scale,
        "deficit_vs_f": rep.deficit_vs_f,
        "rigid_norm_powers": {str(p): v for p, v in sorted(rep.rigid_norm_powers.items())},
        "mixing_norm_sq": rep.mixing_norm_sq,
        "mixing_norm_powers": {str(p): v for p, v in sorted(rep.mixing_norm_powers.items())},
        "ordering_ok": rep.ordering_ok,
        "separation": {
            "k_lo": sep.k_lo,
            "k_hi": sep.k_hi,
            "rigid_support_count": len(sep.rigid_support),
            "rigid_support_max": sep.rigid_support[-1][1] if sep.rigid_support else None,
            "mixing_support_count": len(sep.mixing_support),
            "mixing_support_min": sep.mixing_support[0][0] if sep.mixing_support else None,
            "common_support": [{"k_lo": a, "k_hi": b} for a, b in sep.common_support],
            "k0": sep.k0,
            "separated": sep.separated,
        },
        "ok": ok,
    }
    return ok, report_text("gamma-disjoint", body)


def _cmd_lp(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    c, p, j_max = cfgmod.lp_settings(cfg)
    rep = lp_convergence_report(c, p, j_max)
    header = [
        "j", "q", "boundary_exponent", "zero_value", "delta_norm_pow",
        "bound_pow", "bound_ok", "deviation_pow", "deviation",
        "log2_deviation", "display_chain_value", "display_chain_holds",
    ]
    rows = [
        (
            r.j, r.q, r.boundary_exponent, r.zero_value, r.delta_norm_pow,
            r.bound_pow, r.bound_ok, r.deviation_pow, r.deviation,
            r.log2_deviation, r.display_chain_value, r.display_chain_holds,
        )
        for r in rep.rows
    ]
    trailer = [
        ("c", str(rep.c)),
        ("p", str(rep.p)),
        ("v_norm_pow", f"{rep.v_norm_pow.numerator}/{rep.v_norm_pow.denominator}"),
        ("mean_slope", f"{rep.mean_slope:.12g}"),
        ("asymptotic_slope", f"{rep.asymptotic_slope:.12g}"),
        ("strictly_decreasing", "true" if rep.strictly_decreasing else "false"),
        ("display_chain_consistent",
         "true" if rep.display_chain_consistent else "false"),
    ]
    return rep.ok, csv_text("lp-shift", header, rows, trailer)


def _cmd_oracle(cfg: RunConfig, args: argparse.Namespace) -> tuple[bool, str]:
    st = cfgmod.oracle_settings(cfg)
    geom = build_geometry(cfg.params, cfg.depth)
    f = geom.tower_set(st["f_stage"])
    if "d_values" in st:
        ds = list(st["d_values"])
    else:
        lo = geom.height(st["d_lo_stage"])
        hi = geom.height(st["d_hi_stage"])
        if hi <= lo:
            raise ConfigError("[oracle]: empty displacement window")
        draw = CounterRng(args.seed, -1)  # separate stream from the samples
        ds = [lo + 1 + draw.randbelow(hi - lo) for _ in range(st["d_count"])]
    rows = []
    misses = 0
    for d in ds:
        exact = geom.autocorrelation(f, d)
        est = estimate_autocorrelation(
            geom, f, d, st["n_samples"], seed=args.seed, threads=args.threads
        )
        within = abs(float(exact) - est.estimate) <= 3 * est.std_error
        misses += 0 if within else 1
        rows.append(
            (d, exact, float(exact), est.estimate, est.std_error,
             est.hits, est.n_samples, within)
        )
    ok = misses <= st["allowed_misses"]
    trailer = [
        ("seed", str(args.seed)),
        ("misses", str(misses)),
        ("allowed_misses", str(st["allowed_misses"])),
    ]
    header = ["d", "exact", "exact_float", "estimate", "std_error",
              "hits", "n_samples", "within_3se"]
    return ok, csv_text("oracle-check", header, rows, trailer)


_HANDLERS = {
    "build": _cmd_build,
    "autocorr": _cmd_autocorr,
    "sidon-check": _cmd_sidon,
    "mixing-bound": _cmd_mixing,
    "power-disjoint": _cmd_power,
    "dissipativity": _cmd_dissipativity,
    "thm41": _cmd_thm41,
    "gamma-disjoint": _cmd_gamma,
    "lp-shift": _cmd_lp,
    "oracle-check": _cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sidonlab",
        description="Exact analyses of rank-one Sidon constructions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="TOML run configuration")
        cmd.add_argument("--out", default=None, help="output path (default stdout)")
        cmd.add_argument("--threads", type=int, default=1)
        cmd.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = load_config(args.config)
        ok, text = _HANDLERS[args.command](cfg, args)
    except (ConfigError, ConstructionError, LpParameterError,
            SweepBudgetError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if ok else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
