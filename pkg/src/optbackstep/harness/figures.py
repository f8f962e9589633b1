"""
Figure rendering for run and comparison reports.

Uses the non-interactive Agg backend and writes PNG files next to the CSV
outputs; nothing is shown on screen.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (7.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.labelsize": 11,
    "legend.fontsize": 9,
    "lines.linewidth": 1.2,
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def render_run(trace, outdir, prefix: str = "") -> list[Path]:
    """Tracking, error/control, weight norms, step costs, trigger intervals."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    t = trace["t"]
    n = trace.n
    paths = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(t, trace["x1"], label="$x_1$")
        ax.plot(t, trace["y_r"], "--", label="$y_r$")
        ax.set_xlabel("t [s]")
        ax.legend()
        paths.append(_save(fig, out / f"{prefix}fig1_tracking.png"))

        fig, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 5.0))
        a1.plot(t, trace["e1"])
        a1.set_ylabel("$e_1$")
        a2.plot(t, trace["u"], label="applied $u$")
        a2.set_ylabel("$u$")
        a2.set_xlabel("t [s]")
        paths.append(_save(fig, out / f"{prefix}fig2_error_control.png"))

        fig, ax = plt.subplots()
        for kind, label in (("wf", "identifier"), ("wc", "critic"), ("wa", "actor")):
            col = trace[f"{kind}_norm1"]
            if not np.all(np.isnan(col)):
                ax.plot(t, col, label=f"{label} |w| (step 1)")
        ax.set_xlabel("t [s]")
        ax.legend()
        paths.append(_save(fig, out / f"{prefix}fig3_weights.png"))

        fig, ax = plt.subplots()
        for i in range(1, n + 1):
            ax.plot(t, trace[f"c{i}"], label=f"$c_{i}$")
        ax.set_yscale("symlog", linthresh=1e-3)
        ax.set_xlabel("t [s]")
        ax.legend()
        paths.append(_save(fig, out / f"{prefix}fig4_step_costs.png"))

        ev = np.asarray(trace.event_times)
        if trace.controller == "optimal_et" and len(ev) > 1:
            fig, ax = plt.subplots()
            ax.stem(ev[1:], np.diff(ev), markerfmt=" ", basefmt=" ")
            ax.set_xlabel("t [s]")
            ax.set_ylabel("inter-event interval [s]")
            ax.set_title(f"{len(ev)} events")
            paths.append(_save(fig, out / f"{prefix}fig5_trigger_intervals.png"))
    return paths


def render_comparison(comparison, outdir) -> list[Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        first = comparison.traces[0]
        ax.plot(first["t"], first["y_r"], "k--", label="$y_r$")
        for kind, tr in zip(comparison.kinds, comparison.traces):
            ax.plot(tr["t"], tr["x1"], label=f"$x_1$ ({kind})")
        ax.set_xlabel("t [s]")
        ax.legend()
        paths.append(_save(fig, out / "fig6_tracking_compare.png"))

        fig, ax = plt.subplots()
        for kind, tr in zip(comparison.kinds, comparison.traces):
            ax.plot(tr["t"], tr["cost_total"], label=kind)
        ax.set_xlabel("t [s]")
        ax.set_ylabel("accumulated cost")
        ax.legend()
        paths.append(_save(fig, out / "fig7_total_cost.png"))
    return paths
