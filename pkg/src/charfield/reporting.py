"""Report serialization: CSV rows for sum records, JSON and plain-text
renderings of arbitrary report payloads.

Everything here is deterministic by construction.  Floats print with 12
significant digits, dictionary keys are emitted sorted, and no timestamps
or environment details ever enter a report, so two runs with the same
configuration produce byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np

from .charsum import SumRecord
from .tower import FFElement, TowerContext

CSV_COLUMNS = (
    "q", "m", "theta", "chi_index", "psi_param",
    "re", "im", "modulus", "bound", "slack", "bound_kind",
)


def format_float(x: float) -> str:
    return f"{float(x):.12g}"


def record_row(rec: SumRecord) -> dict:
    """Flatten a sum record into the CSV column set (strings for floats)."""
    return {
        "q": rec.q,
        "m": rec.m,
        "theta": rec.theta.h,
        "chi_index": rec.chi_index,
        "psi_param": rec.psi_param.h,
        "re": format_float(rec.value.real),
        "im": format_float(rec.value.imag),
        "modulus": format_float(rec.modulus),
        "bound": "" if rec.bound is None else format_float(rec.bound),
        "slack": "" if rec.slack is None else format_float(rec.slack),
        "bound_kind": rec.bound_kind,
    }


def record_json(rec: SumRecord) -> dict:
    """Same column set as record_row but with numeric values (None bound)."""
    row = record_row(rec)
    for key in ("re", "im", "modulus", "bound", "slack"):
        row[key] = None if row[key] == "" else float(row[key])
    return row


def record_from_row(row: dict, ctx: TowerContext) -> SumRecord:
    """Inverse of record_row, up to float printing precision."""
    bound = row.get("bound", "")
    return SumRecord(
        q=int(row["q"]),
        m=int(row["m"]),
        theta=FFElement(ctx, int(row["theta"])),
        chi_index=int(row["chi_index"]),
        psi_param=FFElement(ctx, int(row["psi_param"])),
        value=complex(float(row["re"]), float(row["im"])),
        bound=None if bound in ("", None) else float(bound),
        bound_kind=row["bound_kind"],
    )


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(record_row(rec) if isinstance(rec, SumRecord) else rec)
    return buf.getvalue()


def canonicalize(obj):
    """Reduce a payload to plain JSON types with stable float precision."""
    if isinstance(obj, SumRecord):
        return canonicalize(record_json(obj))
    if isinstance(obj, FFElement):
        return obj.h
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(format_float(obj))
    if isinstance(obj, complex):
        return {"im": canonicalize(obj.imag), "re": canonicalize(obj.real)}
    if isinstance(obj, dict):
        return {str(k): canonicalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset, np.ndarray)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [canonicalize(v) for v in items]
    if obj is None or isinstance(obj, str):
        return obj
    return repr(obj)


def to_json(payload) -> str:
    return json.dumps(canonicalize(payload), sort_keys=True, indent=2) + "\n"


def _text_lines(obj, indent: int, out: list[str]):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                out.append(f"{pad}{k}:")
                _text_lines(v, indent + 1, out)
            else:
                out.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                out.append(f"{pad}-")
                _text_lines(v, indent + 1, out)
            else:
                out.append(f"{pad}- {_scalar_text(v)}")
    else:
        out.append(f"{pad}{_scalar_text(obj)}")


def _scalar_text(v) -> str:
    if isinstance(v, float):
        return format_float(v)
    if v is None:
        return "-"
    if isinstance(v, (dict, list)) and not v:
        return "(empty)"
    return str(v)


def to_text(payload) -> str:
    canon = canonicalize(payload)
    records = canon.pop("records", None) if isinstance(canon, dict) else None
    out: list[str] = []
    _text_lines(canon, 0, out)
    if records is not None:
        out.append(f"records ({len(records)}):")
        out.append("  " + ",".join(CSV_COLUMNS))
        for row in records:
            out.append("  " + ",".join(str(row.get(c, "")) for c in CSV_COLUMNS))
    return "\n".join(out) + "\n"


def render(payload: dict, output: str) -> str:
    """Render a report payload in the requested output format.

    CSV keeps only the record table (headers always present); JSON and
    text render the whole payload.
    """
    if output == "csv":
        return records_to_csv(payload.get("records", []))
    if output == "json":
        return to_json(payload)
    if output == "text":
        return to_text(payload)
    raise ValueError(f"unknown output format {output!r}")
