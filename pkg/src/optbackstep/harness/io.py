"""
File outputs.

Trace CSV: one header row with the names from ``trace_columns(n)``, then one
row per sample. Floats use 9 significant digits; ``event`` is 0/1; NaN marks
quantities the controller does not have.

    t, x1..xn, y_r, e1..en, alpha1..alpha{n-1}, u_hat, U, u, u_f,
    c1..cn, c_total, cost1..costn, cost_total,
    wf_norm1..n, wc_norm1..n, wa_norm1..n, K1..Kn, event

``c_i`` is the instantaneous step cost (e_i^2 + alpha_i^2, last step
e_n^2 + u^2 with the applied u); ``cost_i`` its running trapezoidal integral.

Metrics file: JSON object with the fields of ``Metrics``.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .metrics import Metrics


def _fmt(name: str, v: float) -> str:
    if name == "event":
        return str(int(v))
    if math.isnan(v):
        return "nan"
    return f"{v:.9g}"


def export_trace(trace, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(trace.columns)
        cols = trace.columns
        for row in trace.data:
            w.writerow([_fmt(c, v) for c, v in zip(cols, row)])
    return path


def read_trace(path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    return header, data


def write_metrics(metrics: Metrics | dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = metrics.as_dict() if isinstance(metrics, Metrics) else metrics
    path.write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n")
    return path
