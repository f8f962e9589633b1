"""Scalar summaries of a SimTrace."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import RejectedInput
from .runner import SimTrace


@dataclass
class Metrics:
    controller: str
    samples: int
    t_end: float
    event_count: int
    single_event: bool
    min_interval: float | None
    mean_interval: float | None
    final_abs_e1: float
    peak_abs_e1: float
    rmse_e1: float
    total_cost: float
    step_costs: list[float]
    peak_wf_norm: list[float]
    peak_wc_norm: list[float]
    peak_wa_norm: list[float]
    blowup: bool
    blowup_time: float | None

    def as_dict(self) -> dict:
        return asdict(self)


def _trapz(y: np.ndarray, t: np.ndarray) -> float:
    if len(t) < 2:
        return 0.0
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def event_intervals(times, dt: float | None = None) -> np.ndarray:
    """Gaps between consecutive events; with ``dt`` they are snapped to whole samples."""
    gaps = np.diff(np.asarray(times, dtype=float))
    if dt is None:
        return gaps
    return np.round(gaps / dt) * dt


def compute_metrics(trace: SimTrace) -> Metrics:
    """Aggregate a trace. Costs are trapezoidal integrals of the c_i columns."""
    if len(trace) == 0:
        raise RejectedInput("cannot summarize an empty trace")
    n = trace.n
    t = trace["t"]
    e1 = trace["e1"]
    events = list(trace.event_times)
    gaps = event_intervals(events, trace.dt)
    single = len(events) == 1
    if len(gaps):
        min_iv, mean_iv = float(gaps.min()), float(gaps.mean())
    elif single:
        # one event only: report the span it covers
        min_iv = mean_iv = float(t[-1] - events[0])
    else:
        min_iv = mean_iv = None

    def peaks(prefix):
        return [float(np.nanmax(trace[f"{prefix}_norm{i}"])) if not np.all(np.isnan(trace[f"{prefix}_norm{i}"]))
                else float("nan") for i in range(1, n + 1)]

    step_costs = [_trapz(trace[f"c{i}"], t) for i in range(1, n + 1)]
    return Metrics(
        controller=trace.controller,
        samples=len(trace),
        t_end=float(t[-1]),
        event_count=len(events),
        single_event=single,
        min_interval=min_iv,
        mean_interval=mean_iv,
        final_abs_e1=float(abs(e1[-1])),
        peak_abs_e1=float(np.max(np.abs(e1))),
        rmse_e1=float(np.sqrt(np.mean(e1**2))),
        total_cost=_trapz(trace["c_total"], t),
        step_costs=step_costs,
        peak_wf_norm=peaks("wf"),
        peak_wc_norm=peaks("wc"),
        peak_wa_norm=peaks("wa"),
        blowup=trace.blowup is not None,
        blowup_time=trace.blowup_time,
    )
