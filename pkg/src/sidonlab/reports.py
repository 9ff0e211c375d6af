"""Deterministic output: CSV tables and JSON reports.

Rationals travel as "num/den" strings in lowest terms next to a float
column rounded to 12 significant digits; JSON reports keep sorted keys.
Identical inputs give identical bytes, which the determinism checks rely
on, so nothing here may consult time, locale or dict iteration order of
caller data (rows are emitted in the order given and must be pre-sorted).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Iterable, Sequence


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def float_str(x: float) -> str:
    return f"{float(x):.12g}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


def csv_text(command: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
             trailer: Sequence[tuple[str, str]] = ()) -> str:
    """Schema-tagged CSV; trailer pairs become '# key=value' comment lines."""
    lines = [f"# schema={command}/v1", ",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} != header width {len(header)}")
        lines.append(",".join(_cell(v) for v in row))
    for key, value in trailer:
        lines.append(f"# {key}={value}")
    return "\n".join(lines) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return frac_str(v)
    if isinstance(v, float):
        return float_str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        if "," in v or "\n" in v:
            raise ValueError(f"cell {v!r} would break the row")
        return v
    raise TypeError(f"unsupported cell type {type(v).__name__}")


def parse_csv(text: str) -> tuple[str, list[str], list[list[str]], dict[str, str]]:
    """Inverse of csv_text: (schema, header, rows, trailer)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise ValueError("missing schema line")
    schema = lines[0][len("# schema="):]
    header = lines[1].split(",")
    rows = []
    trailer = {}
    for line in lines[2:]:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            trailer[key] = value
        elif line:
            rows.append(line.split(","))
    return schema, header, rows, trailer


def json_ready(obj: Any) -> Any:
    """Recursively rewrite Fractions to num/den strings and round floats."""
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, float):
        return float(float_str(obj))
    if isinstance(obj, dict):
        return {str(k): json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    return obj


def report_text(command: str, body: dict) -> str:
    doc = {"schema": f"{command}/v1"}
    doc.update(body)
    return json.dumps(json_ready(doc), sort_keys=True, indent=2) + "\n"
