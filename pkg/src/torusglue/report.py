"""Deterministic report serialization: canonical JSON and CSV.

Byte-identical output for identical inputs is part of the contract, so
nothing here defers to locale, hash order, or repr drift: keys are sorted,
floats always print as %.17g, exact scalars use the fixed wire grammar,
and every file ends with exactly one newline.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .numerics import QuadScalar, as_float, format_scalar, parse_scalar


def scalar_json(x):
    """JSON-ready view of a scalar: floats and ints pass through, exact values
    become wire-grammar strings so they survive the round trip losslessly."""
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, (Fraction, QuadScalar)):
        return format_scalar(x)
    raise TypeError(f"no JSON form for {type(x).__name__}")


def _float_text(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("non-finite float has no place in a report")
    return "%.17g" % x


def _write(obj, parts: list[str], indent: int) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, float):
        parts.append(_float_text(obj))
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, (Fraction, QuadScalar)):
        parts.append(json.dumps(format_scalar(obj)))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, item in enumerate(obj):
            parts.append(inner)
            _write(item, parts, indent + 1)
            parts.append(",\n" if i + 1 < len(obj) else "\n")
        parts.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        keys = sorted(obj)
        if any(not isinstance(k, str) for k in keys):
            raise TypeError("report keys must be strings")
        parts.append("{\n")
        for i, key in enumerate(keys):
            parts.append(inner + json.dumps(key) + ": ")
            _write(obj[key], parts, indent + 1)
            parts.append(",\n" if i + 1 < len(keys) else "\n")
        parts.append(pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    parts: list[str] = []
    _write(obj, parts, 0)
    parts.append("\n")
    return "".join(parts)


DENSITY_CSV_HEADER = "target_u1,target_u2,t,distance"


def density_csv(report) -> str:
    """Flat table of density hits, one row per achieved approach.

    Columns are target_u1, target_u2, t, distance; all values print as
    %.17g floats.  Misses (no hit within budget) are skipped: the table
    records achieved distances, the JSON report records failures.
    """
    data = report.describe() if hasattr(report, "describe") else report
    rows = [DENSITY_CSV_HEADER]
    reports = data if isinstance(data, list) else [data]

    def value_of(x) -> float:
        return as_float(parse_scalar(x)) if isinstance(x, str) else float(x)

    for rep in reports:
        u1 = value_of(rep["target"]["u1"])
        u2 = value_of(rep["target"]["u2"])
        for entry in rep["results"]:
            hit = entry["hit"]
            if hit is None:
                continue
            rows.append(
                ",".join(
                    _float_text(v) for v in (u1, u2, value_of(hit["t"]), hit["distance"])
                )
            )
    return "\n".join(rows) + "\n"


def write_report(text: str, path: str | None) -> None:
    """Write to a file, or stdout when no path is given."""
    if path is None:
        import sys

        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
