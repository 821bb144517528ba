"""Trace export (CSV/JSON) and run comparison tables.

Exports are deterministic: a given trace always renders to identical
bytes.  Floats are written with 17 significant digits in CSV; the JSON
form round-trips every numeric field exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .drivers import DEGENERATE, IterationRecord, RunTrace

__all__ = ["export_trace", "trace_to_dict", "summarize"]

CSV_COLUMNS = (
    "k",
    "applied_input",
    "reference",
    "plant_value",
    "grad_norm",
    "rho",
    "radius",
    "accepted",
    "cauchy_override",
)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fmt_vector(vec) -> str:
    return ";".join(_fmt(x) for x in np.asarray(vec).reshape(-1))


def _fmt_rho(rho) -> str:
    if rho is None:
        return ""
    if rho == DEGENERATE:
        return DEGENERATE
    return _fmt(rho)


def _record_csv_row(r: IterationRecord) -> str:
    radius = "" if r.radius is None else _fmt(r.radius)
    return ",".join(
        (
            str(r.k),
            _fmt_vector(r.applied_input),
            _fmt_vector(r.reference),
            _fmt(r.plant_value_at_reference),
            _fmt(r.plant_gradient_norm_at_reference),
            _fmt_rho(r.rho),
            radius,
            "true" if r.accepted else "false",
            "true" if r.cauchy_override else "false",
        )
    )


def _record_to_dict(r: IterationRecord) -> dict:
    return {
        "k": r.k,
        "applied_input": [float(x) for x in r.applied_input],
        "reference": [float(x) for x in r.reference],
        "plant_value_at_reference": float(r.plant_value_at_reference),
        "plant_gradient_norm_at_reference": float(r.plant_gradient_norm_at_reference),
        "rho": r.rho if (r.rho is None or r.rho == DEGENERATE) else float(r.rho),
        "radius": None if r.radius is None else float(r.radius),
        "accepted": r.accepted,
        "cauchy_override": r.cauchy_override,
        "modifiers": [float(x) for x in r.modifiers],
    }


def trace_to_dict(trace: RunTrace) -> dict:
    return {
        "problem": trace.problem_id,
        "algorithm": trace.algorithm,
        "config": trace.config,
        "termination_status": trace.termination_status,
        "plant_value_evaluations": trace.plant_value_evaluations,
        "plant_gradient_evaluations": trace.plant_gradient_evaluations,
        "final_reference": [float(x) for x in trace.final_reference],
        "final_plant_value": float(trace.final_plant_value),
        "final_gradient_norm": float(trace.final_gradient_norm),
        "notes": list(trace.notes),
        "records": [_record_to_dict(r) for r in trace.records],
    }


def export_trace(trace: RunTrace, format: str, path) -> Path:
    """Write the trace to ``path`` as CSV (one row per iteration) or JSON
    (full record fields).  Returns the written path.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    path = Path(path)
    if format == "csv":
        lines = [",".join(CSV_COLUMNS)]
        lines.extend(_record_csv_row(r) for r in trace.records)
        payload = "\n".join(lines) + "\n"
    else:
        payload = json.dumps(trace_to_dict(trace), indent=2) + "\n"
    try:
        path.write_text(payload, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc
    return path


_SUMMARY_COLUMNS = (
    "problem",
    "algorithm",
    "status",
    "iterations",
    "plant_evals",
    "final_grad_norm",
    "final_plant_value",
)


def _summary_row(trace: RunTrace) -> tuple[str, ...]:
    return (
        trace.problem_id,
        trace.algorithm,
        trace.termination_status,
        str(trace.iterations),
        str(trace.plant_evaluation_count),
        format(trace.final_gradient_norm, ".6g"),
        format(trace.final_plant_value, ".6g"),
    )


def summarize(traces, csv_path=None) -> str:
    """Aligned comparison table over a non-empty list of traces; with
    ``csv_path`` the same table is also written as CSV."""
    traces = list(traces)
    if not traces:
        raise ValueError("summarize requires at least one trace")
    rows = [_summary_row(t) for t in traces]
    widths = [
        max(len(_SUMMARY_COLUMNS[i]), max(len(row[i]) for row in rows))
        for i in range(len(_SUMMARY_COLUMNS))
    ]
    header = "  ".join(name.ljust(widths[i]) for i, name in enumerate(_SUMMARY_COLUMNS))
    rule = "  ".join("-" * w for w in widths)
    body = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        for row in rows
    ]
    text = "\n".join([header, rule, *body])
    if csv_path is not None:
        lines = [",".join(_SUMMARY_COLUMNS)]
        lines.extend(",".join(row) for row in rows)
        Path(csv_path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return text
