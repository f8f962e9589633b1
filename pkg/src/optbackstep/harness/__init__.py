"""Experiment orchestration: configs, closed-loop runs, metrics, outputs."""
from .compare import Comparison, compare_run
from .config import SimConfig, demo_config, load_config
from .metrics import Metrics, compute_metrics
from .runner import SimTrace, run_simulation

__all__ = [
    "Comparison", "Metrics", "SimConfig", "SimTrace",
    "compare_run", "compute_metrics", "demo_config", "load_config", "run_simulation",
]
