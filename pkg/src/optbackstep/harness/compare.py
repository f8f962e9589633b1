"""Side-by-side runs of two controllers on the same plant, reference and grid."""
from __future__ import annotations

from dataclasses import dataclass

from .config import SimConfig, validate_config
from .metrics import Metrics, compute_metrics
from .runner import SimTrace, run_simulation


@dataclass
class Comparison:
    kinds: tuple[str, str]
    traces: tuple[SimTrace, SimTrace]
    metrics: tuple[Metrics, Metrics]

    @property
    def cost_difference(self) -> float:
        """First controller's total cost minus the second's."""
        return self.metrics[0].total_cost - self.metrics[1].total_cost

    @property
    def rmse_ratio(self) -> float:
        a, b = self.metrics[0].rmse_e1, self.metrics[1].rmse_e1
        return max(a, b) / min(a, b) if min(a, b) > 0 else float("inf")

    def report(self) -> dict:
        out = {}
        for (kind, m), label in zip(zip(self.kinds, self.metrics), ("first", "second")):
            out[label] = {
                "controller": kind,
                "total_cost": m.total_cost,
                "step_costs": m.step_costs,
                "rmse_e1": m.rmse_e1,
                "peak_abs_e1": m.peak_abs_e1,
                "event_count": m.event_count,
                "samples": m.samples,
                "blowup": m.blowup,
            }
        out["cost_difference"] = self.cost_difference
        out["rmse_ratio"] = self.rmse_ratio
        out["first_cheaper"] = self.cost_difference < 0
        return out


def compare_run(cfg: SimConfig, kinds: tuple[str, str] = ("optimal_et", "baseline")) -> Comparison:
    validate_config(cfg)
    traces = tuple(run_simulation(cfg.replace(controller=k)) for k in kinds)
    return Comparison(tuple(kinds), traces, tuple(compute_metrics(tr) for tr in traces))
