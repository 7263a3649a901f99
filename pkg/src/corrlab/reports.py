"""JSON and CSV emission helpers with stable, reproducible formatting.

JSON reports carry a top-level ``schema_version`` (currently 1), keep keys
sorted, render floats at full double precision, and contain no timestamps,
so a run with a fixed seed serializes to identical bytes every time. CSV
output uses header rows, UTF-8 and LF line endings. Complex matrices are
serialized as row-major lists of (real, imaginary) pairs.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA_VERSION = 1


def fmt6(x: float) -> str:
    """Pretty-text number formatting: six significant digits."""
    return f"{x:.6g}"


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def report_json(command: str, config: dict, results: dict) -> str:
    """Canonical JSON report body (sorted keys, trailing newline)."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": _sanitize(config),
        "results": _sanitize(results),
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def complex_matrix_to_json(m: np.ndarray) -> list:
    """Row-major nested lists of [real, imaginary] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def complex_matrix_from_json(data: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)


def payoff_report_dict(report) -> dict:
    """Fixed-field-name serialization of a PayoffReport."""
    per_state = [
        {"label": label, "p": p, "stderr": se} for label, (p, se) in report.per_state.items()
    ]
    return {
        "per_state": per_state,
        "class_means": {
            name: {"p": p, "stderr": se} for name, (p, se) in report.class_means.items()
        },
        "overall": {"payoff": report.overall[0], "stderr": report.overall[1]},
        "shots": report.shots,
        "method": report.method,
    }


def mutual_info_dict(report) -> dict:
    return {
        "variable": report.variable,
        "conditioning": report.conditioning,
        "estimate_bits": report.estimate_bits,
        "bias_corrected_bits": report.bias_corrected_bits,
        "bootstrap_stderr_bits": report.bootstrap_stderr_bits,
        "n_records": report.n_records,
        "n_used": report.n_used,
    }
