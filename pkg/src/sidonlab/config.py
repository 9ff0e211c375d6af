"""Run configuration: one TOML document per invocation.

The [construction] table picks exactly one parameter source through its
kind key; the remaining tables carry per-command settings and are read by
the command that needs them, so one file can drive several commands.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .construction import (
    ConstructionParams,
    explicit_params,
    power_spacer_params,
    ratio_spacer_params,
)


class ConfigError(ValueError):
    """Unusable configuration file."""


def parse_rational(value: Any, where: str) -> Fraction:
    """Accepts ints, "num/den" strings and decimal strings."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"{where}: bad rational {value!r}: {e}") from None
    raise ConfigError(f"{where}: expected int or string rational, got {type(value).__name__}")


def _require(table: dict, key: str, kind: type, where: str) -> Any:
    if key not in table:
        raise ConfigError(f"{where}: missing key {key!r}")
    val = table[key]
    if kind is int and isinstance(val, bool) or not isinstance(val, kind):
        raise ConfigError(f"{where}: key {key!r} must be {kind.__name__}")
    return val


def _int_list(table: dict, key: str, where: str) -> list[int]:
    val = _require(table, key, list, where)
    if not all(isinstance(x, int) and not isinstance(x, bool) for x in val):
        raise ConfigError(f"{where}: key {key!r} must be a list of integers")
    return val


def _construction(table: dict) -> ConstructionParams:
    where = "[construction]"
    kind = _require(table, "kind", str, where)
    h1 = _require(table, "h1", int, where)
    if kind == "sidon_power":
        return power_spacer_params(
            h1,
            _require(table, "r", int, where),
            _require(table, "base", int, where),
            _require(table, "stages", int, where),
        )
    if kind == "geometric_psi":
        return ratio_spacer_params(
            h1,
            _require(table, "r", int, where),
            _require(table, "psi0", int, where),
            _require(table, "psi_step", int, where),
            _require(table, "stages", int, where),
            r_power=bool(table.get("r_power", False)),
        )
    if kind == "explicit":
        stages = _require(table, "stages", list, where)
        parsed = []
        for idx, st in enumerate(stages, 1):
            if not isinstance(st, dict):
                raise ConfigError(f"{where}: stage {idx} must be a table")
            parsed.append(
                (_require(st, "r", int, f"{where} stage {idx}"),
                 _int_list(st, "spacers", f"{where} stage {idx}"))
            )
        return explicit_params(h1, parsed)
    raise ConfigError(
        f"{where}: unknown kind {kind!r} "
        "(expected sidon_power, geometric_psi or explicit)"
    )


@dataclass
class RunConfig:
    params: ConstructionParams
    depth: int
    tables: dict[str, dict]

    def table(self, name: str) -> dict:
        """The per-command table; missing means the command got no settings."""
        section = self.tables.get(name)
        if section is None:
            raise ConfigError(f"missing [{name}] table")
        return section

    def get_int(self, name: str, key: str, default: Optional[int] = None) -> int:
        section = self.table(name)
        if key not in section:
            if default is None:
                raise ConfigError(f"[{name}]: missing key {key!r}")
            return default
        return _require(section, key, int, f"[{name}]")


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config does not parse: {e}") from None
    if "construction" not in doc or not isinstance(doc["construction"], dict):
        raise ConfigError("config needs a [construction] table")
    params = _construction(doc["construction"])
    depth = doc["construction"].get("depth", len(params.stages) + 1)
    if not isinstance(depth, int) or isinstance(depth, bool) or depth < 1:
        raise ConfigError("[construction]: depth must be a positive integer")
    tables = {k: v for k, v in doc.items() if isinstance(v, dict)}
    return RunConfig(params=params, depth=depth, tables=tables)


# per-command views


def autocorr_settings(cfg: RunConfig) -> tuple[int, int, int]:
    t = cfg.table("autocorr")
    return (
        cfg.get_int("autocorr", "f_stage", 1),
        _require(t, "m_lo", int, "[autocorr]"),
        _require(t, "m_hi", int, "[autocorr]"),
    )


def sidon_settings(cfg: RunConfig) -> tuple[int, Optional[tuple[int, int]]]:
    t = cfg.table("sidon")
    stage = _require(t, "stage", int, "[sidon]")
    if ("m_lo" in t) != ("m_hi" in t):
        raise ConfigError("[sidon]: m_lo and m_hi come together")
    window = None
    if "m_lo" in t:
        window = (_require(t, "m_lo", int, "[sidon]"),
                  _require(t, "m_hi", int, "[sidon]"))
    return stage, window


def mixing_settings(cfg: RunConfig) -> tuple[int, list[int]]:
    t = cfg.table("mixing")
    return (
        cfg.get_int("mixing", "base_stage", 1),
        _int_list(t, "stages", "[mixing]"),
    )


def power_settings(cfg: RunConfig) -> tuple[int, int, Optional[tuple[int, int]]]:
    t = cfg.table("power_disjoint")
    stage = _require(t, "stage", int, "[power_disjoint]")
    p = _require(t, "p", int, "[power_disjoint]")
    if ("m_lo" in t) != ("m_hi" in t):
        raise ConfigError("[power_disjoint]: m_lo and m_hi come together")
    window = None
    if "m_lo" in t:
        window = (_require(t, "m_lo", int, "[power_disjoint]"),
                  _require(t, "m_hi", int, "[power_disjoint]"))
    return stage, p, window


def dissipativity_settings(cfg: RunConfig) -> tuple[int, int, Optional[int]]:
    t = cfg.table("dissipativity")
    depth = None
    if "depth" in t:
        depth = _require(t, "depth", int, "[dissipativity]")
    return (
        cfg.get_int("dissipativity", "base_stage", 1),
        _require(t, "horizon", int, "[dissipativity]"),
        depth,
    )


def thm41_settings(cfg: RunConfig) -> tuple[int, int, list[int]]:
    t = cfg.table("thm41")
    return (
        _require(t, "start_stage", int, "[thm41]"),
        _require(t, "m_blocks", int, "[thm41]"),
        _int_list(t, "p_list", "[thm41]"),
    )


def gamma_settings(cfg: RunConfig) -> tuple[list[str], int, list[int], Optional[tuple[int, int]]]:
    t = cfg.table("gamma")
    seeds = _require(t, "seeds", list, "[gamma]")
    if len(seeds) < 2 or not all(isinstance(s, str) for s in seeds):
        raise ConfigError("[gamma]: seeds must be at least two bit strings")
    block = _require(t, "block", int, "[gamma]")
    p_list = _int_list(t, "p_list", "[gamma]") if "p_list" in t else [2, 3]
    if ("k_lo" in t) != ("k_hi" in t):
        raise ConfigError("[gamma]: k_lo and k_hi come together")
    k_range = None
    if "k_lo" in t:
        k_range = (_require(t, "k_lo", int, "[gamma]"),
                   _require(t, "k_hi", int, "[gamma]"))
    return seeds, block, p_list, k_range


def lp_settings(cfg: RunConfig) -> tuple[Fraction, int, int]:
    t = cfg.table("lp")
    if "c" not in t:
        raise ConfigError("[lp]: missing key 'c'")
    return (
        parse_rational(t["c"], "[lp] c"),
        _require(t, "p", int, "[lp]"),
        _require(t, "j_max", int, "[lp]"),
    )


def oracle_settings(cfg: RunConfig) -> dict:
    t = cfg.table("oracle")
    out = {
        "f_stage": cfg.get_int("oracle", "f_stage", 1),
        "n_samples": _require(t, "n_samples", int, "[oracle]"),
        "allowed_misses": cfg.get_int("oracle", "allowed_misses", 1),
    }
    if "d_values" in t:
        out["d_values"] = _int_list(t, "d_values", "[oracle]")
    else:
        out["d_count"] = _require(t, "d_count", int, "[oracle]")
        out["d_lo_stage"] = cfg.get_int("oracle", "d_lo_stage", 1)
        out["d_hi_stage"] = _require(t, "d_hi_stage", int, "[oracle]")
    return out
