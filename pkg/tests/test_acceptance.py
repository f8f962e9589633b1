"""Acceptance gate. Each test records one PASS/FAIL line in the terminal summary."""

import math
import time

import numpy as np
import pytest

from optbackstep.controller import StepGains, StepState, weight_derivatives
from optbackstep.harness import compare_run, compute_metrics, demo_config, run_simulation
from optbackstep.harness.io import export_trace
from optbackstep.numkit import OdeStepper, RbfLayout, butterworth2_design, ode_step


@pytest.fixture(scope="module")
def comparison():
    return compare_run(demo_config())


@pytest.fixture(scope="module")
def demo(comparison):
    return comparison.traces[0]


@pytest.fixture(scope="module")
def demo_metrics(demo):
    return compute_metrics(demo)


def test_c1_update_law_identity(verdict):
    rng = np.random.default_rng(20240611)
    worst_identity = 0.0
    worst_k_rate = -math.inf
    start = time.perf_counter()
    for _ in range(1000):
        m = int(rng.integers(1, 26))
        eps_a = rng.uniform(0.6, 40.0)
        eps_c = rng.uniform(eps_a / 2, eps_a)
        gains = StepGains(rho=4.0, gamma=rng.uniform(0.1, 5.0), eps_c=eps_c, eps_a=eps_a, pi_gain=1.0)
        net = RbfLayout(np.zeros((m, 1)), 1.0)
        step = StepState(rng.uniform(-1, 1, m), rng.uniform(-1, 1, m), rng.uniform(-1, 1, m), net, net, gains)
        b = rng.uniform(0.0, 1.0, m)
        _, dw_c, dw_a = weight_derivatives(step, float(rng.uniform(-1, 1)), b, b)
        d = step.w_a - step.w_c
        want = -eps_a * b * float(b @ d)
        # floating-point terms grow with the basis size; compare relative to their magnitude
        scale = max(1.0, float(np.max(np.abs(dw_a))), float(np.max(np.abs(dw_c))))
        worst_identity = max(worst_identity, float(np.max(np.abs((dw_a - dw_c) - want))) / scale)
        worst_k_rate = max(worst_k_rate, 2.0 * float(d @ (dw_a - dw_c)) / scale)
    elapsed = time.perf_counter() - start
    ok = worst_identity <= 1e-12 and worst_k_rate <= 1e-12 and elapsed < 1.0
    verdict("C1 update-law identity", ok,
            f"max scaled residual {worst_identity:.2e} (<=1e-12), max scaled dK/dt {worst_k_rate:.2e} (<=0), "
            f"{elapsed:.3f}s (<1s)")


def test_c2_integrator_order(verdict):
    start = time.perf_counter()

    def err(dt):
        stepper, x = OdeStepper("rk4", dt), np.array([1.0])
        for k in range(int(round(1.0 / dt))):
            x = ode_step(stepper, lambda t, y: y, k * dt, x)
        return abs(x[0] - math.e)

    ratio = err(1e-2) / err(5e-3)
    elapsed = time.perf_counter() - start
    verdict("C2 integrator order", ratio >= 14 and elapsed < 1.0,
            f"error ratio {ratio:.3f} (>=14), {elapsed:.3f}s (<1s)")


def test_c3_filter_fidelity(verdict):
    dc = butterworth2_design(1.141, 10.0, 1e-3).dc_gain
    mag = abs(butterworth2_design(1.4142, 10.0, 1e-3).response(10.0, 1e-3))
    ok = abs(dc - 1.0) <= 1e-9 and abs(mag - 1 / math.sqrt(2)) <= 1e-3
    verdict("C3 filter fidelity", ok,
            f"DC gain {dc:.12f} (1 +- 1e-9), |H(cutoff)| {mag:.6f} (0.707107 +- 1e-3)")


def test_c4_demo_tracking(verdict, demo):
    t, e1 = demo["t"], np.abs(demo["e1"])
    pre = float(e1[(t >= 5) & (t < 10)].max())
    post = float(e1[(t >= 13) & (t <= 20)].max())
    early = t <= 1.0
    ratios = []
    for col in ("wf_norm", "wc_norm", "wa_norm"):
        for i in (1, 2):
            w = demo[f"{col}{i}"]
            ratios.append(float(w.max() / w[early].max()))
    ok = (pre < 0.1 and post < 0.1 and demo.blowup is None
          and len(demo) == 20001 and max(ratios) < 10.0)
    verdict("C4 demo tracking", ok,
            f"max|e1| [5,10) {pre:.4f}, [13,20] {post:.4f} (<0.1), blowup={demo.blowup is not None}, "
            f"weight peak / transient peak {max(ratios):.2f} (<10)")


def test_c5_trigger_economy(verdict, demo_metrics):
    m = demo_metrics
    print(f"demo event_count = {m.event_count}")
    ok = m.event_count <= 2000 and 200 <= m.event_count <= 3000 and m.min_interval >= 0.001
    verdict("C5 trigger economy", ok,
            f"events {m.event_count} of {m.samples} samples (<=2000, anchor [200,3000]), "
            f"min interval {m.min_interval:.4f}s (>=0.001)")


def test_c6_cost_comparison(verdict, comparison):
    opt, base = comparison.metrics
    ratio = max(opt.rmse_e1, base.rmse_e1) / min(opt.rmse_e1, base.rmse_e1)
    ok = opt.total_cost < base.total_cost and ratio <= 2.0
    verdict("C6 cost comparison", ok,
            f"optimal cost {opt.total_cost:.2f} vs baseline {base.total_cost:.2f} (need <), "
            f"RMSE {opt.rmse_e1:.4f} vs {base.rmse_e1:.4f}, ratio {ratio:.3f} (<=2)")


def test_c7_trigger_safety(verdict, demo):
    p = demo_config().trigger
    u, U = demo["u"], demo["U"]
    slack = p.beta * np.abs(u) + p.theta - np.abs(u - U)
    verdict("C7 trigger safety", bool(np.all(slack >= 0)),
            f"min slack {float(slack.min()):.4f} over {len(u)} samples (>=0)")


def test_c8_determinism(verdict, demo, tmp_path):
    again = run_simulation(demo_config())
    a = export_trace(demo, tmp_path / "a.csv").read_bytes()
    b = export_trace(again, tmp_path / "b.csv").read_bytes()
    verdict("C8 determinism", a == b, f"CSV bytes identical: {a == b} ({len(a)} bytes)")


def test_c9_fault_consistency(verdict, demo):
    cfg = demo_config()
    cfg.plant.fault.enabled = False
    cfg.time.t_end = 10.0
    clean = run_simulation(cfg)
    n = int(np.count_nonzero(demo["t"] < cfg.plant.fault.t0))
    same = clean.data[:n].tobytes() == demo.data[:n].tobytes()
    verdict("C9 fault consistency", same,
            f"{n} rows with t<10 bitwise identical: {same}")
