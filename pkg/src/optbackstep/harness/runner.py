"""Closed-loop runner: builds plant and controller from a config and integrates."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..baseline import BaselineState, BaselineStep, baseline_tick, baseline_weight_field
from ..controller import (
    ControllerState,
    StepGains,
    StepState,
    TriggerParams,
    controller_tick,
    weight_field,
)
from ..errors import NumericBlowup, RejectedInput, ConfigError
from ..numkit import OdeStepper, RbfLayout, butterworth2_design, ode_step
from ..plant import FaultModel, PlantModel, ReferenceSignal, build_plant, fault_term, plant_derivative, reference
from .config import SimConfig, validate_config

log = logging.getLogger(__name__)


def trace_columns(n: int) -> list[str]:
    r = range(1, n + 1)
    cols = ["t", *(f"x{i}" for i in r), "y_r", *(f"e{i}" for i in r)]
    cols += [f"alpha{i}" for i in range(1, n)]
    cols += ["u_hat", "U", "u", "u_f"]
    cols += [f"c{i}" for i in r] + ["c_total"]
    cols += [f"cost{i}" for i in r] + ["cost_total"]
    for kind in ("wf", "wc", "wa"):
        cols += [f"{kind}_norm{i}" for i in r]
    cols += [f"K{i}" for i in r]
    cols.append("event")
    return cols


@dataclass
class SimTrace:
    """Per-sample record of one closed-loop run.

    ``data`` has one row per sample and one column per name in ``columns``.
    Quantities a controller does not have (critic weights for the baseline)
    are NaN. After a blowup the trace holds the rows recorded before it.
    """

    controller: str
    n: int
    dt: float
    t_end: float
    columns: list[str]
    data: np.ndarray
    event_times: list[float] = field(default_factory=list)
    blowup: str | None = None
    blowup_time: float | None = None

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(name) from None


# -- builders -----------------------------------------------------------------

def make_plant(cfg: SimConfig) -> PlantModel:
    fs = cfg.plant.fault
    fault = FaultModel(float(fs.t0), float(fs.alpha), fault_term(fs.lambda_)) if fs.enabled else None
    return build_plant(cfg.plant.nonlinearities, fault)


def _bases(cfg: SimConfig, i: int, n: int) -> tuple[RbfLayout, RbfLayout]:
    r = cfg.rbf
    sb, sp = tuple(map(float, r.state_bounds)), int(r.state_points)
    eb, ep = tuple(map(float, r.error_bounds)), int(r.error_points)
    state = [sb] * i
    if i < n:
        net_f = RbfLayout.grid(state, [sp] * i)
    else:
        net_f = RbfLayout.grid(state + [tuple(map(float, r.control_bounds))], [sp] * i + [int(r.control_points)])
    net_j = RbfLayout.grid(state + [eb], [sp] * i + [ep])
    return net_f, net_j


def make_controller(cfg: SimConfig) -> ControllerState:
    n = cfg.n
    w0 = float(cfg.initial_weight)
    steps = []
    for i, spec in enumerate(cfg.steps, start=1):
        gains = StepGains(float(spec.rho), float(spec.gamma), float(spec.eps_c), float(spec.eps_a), float(spec.pi))
        gains.validate(cfg.strict)
        net_f, net_j = _bases(cfg, i, n)
        steps.append(StepState(
            np.full(net_f.count, w0), np.full(net_j.count, w0), np.full(net_j.count, w0), net_f, net_j, gains,
        ))
    tr = cfg.trigger
    params = TriggerParams(float(tr.beta), float(tr.theta), float(tr.zeta), float(tr.v)).validate(cfg.strict)
    try:
        filt = butterworth2_design(float(cfg.filter.coeff_mid), float(cfg.filter.cutoff), float(cfg.time.dt))
    except RejectedInput as exc:
        raise ConfigError(f"filter: {exc}") from None
    return ControllerState(steps, params, filt)


def make_baseline(cfg: SimConfig) -> BaselineState:
    n = cfg.n
    w0 = float(cfg.initial_weight)
    gains = cfg.baseline.gains or [s.rho for s in cfg.steps]
    r = cfg.rbf
    sb, sp = tuple(map(float, r.state_bounds)), int(r.state_points)
    steps = []
    for i, (spec, k) in enumerate(zip(cfg.steps, gains), start=1):
        net = RbfLayout.grid([sb] * i, [sp] * i)
        steps.append(BaselineStep(np.full(net.count, w0), net, float(k), float(spec.gamma), float(spec.pi)))
    assert len(steps) == n
    return BaselineState(steps).validate(cfg.strict)


# -- simulation ----------------------------------------------------------------

def _norms(state, kind: str, n: int) -> np.ndarray:
    out = np.full(4 * n, np.nan)
    for i, st in enumerate(state.steps):
        out[i] = np.linalg.norm(st.w_f)
        if kind == "optimal_et":
            out[n + i] = np.linalg.norm(st.w_c)
            out[2 * n + i] = np.linalg.norm(st.w_a)
            d = st.w_a - st.w_c
            out[3 * n + i] = d @ d
    return out


def run_simulation(cfg: SimConfig) -> SimTrace:
    """Integrate plant and controller weights on a fixed grid.

    Per sample: controller tick (trigger decision, held control), record the
    row, then one integrator step of the joint state (plant, weights) with the
    applied control and filtered control frozen over the step.
    """
    validate_config(cfg)
    kind = cfg.controller
    n = cfg.n
    plant = make_plant(cfg)
    ref: ReferenceSignal = reference(cfg.reference)
    if kind == "optimal_et":
        state, tick, field_fn = make_controller(cfg), controller_tick, weight_field
    else:
        state, tick, field_fn = make_baseline(cfg), baseline_tick, baseline_weight_field
    dt = float(cfg.time.dt)
    stepper = OdeStepper(cfg.time.method, dt)
    samples = cfg.sample_count
    cols = trace_columns(n)
    data = np.full((samples, len(cols)), np.nan)

    x = np.asarray(cfg.plant.initial_state, dtype=float)
    w = state.pack_weights()
    acc = np.zeros(n + 1)
    prev_c = None
    events: list[float] = []
    blowup = blowup_time = None
    rows = 0

    for k in range(samples):
        t = k * dt
        try:
            state.load_weights(w)
            tk = tick(state, t, x, ref)
        except NumericBlowup as exc:
            blowup, blowup_time = str(exc), t
            break
        c = np.empty(n + 1)
        c[: n - 1] = tk.errors[:-1] ** 2 + tk.alphas**2
        c[n - 1] = tk.errors[-1] ** 2 + tk.u**2
        c[n] = c[:n].sum()
        if prev_c is not None:
            acc += 0.5 * dt * (prev_c + c)
        prev_c = c
        if tk.fired and kind == "optimal_et":
            events.append(t)
        data[k] = np.concatenate((
            [t], x, [ref.y_r(t)], tk.errors, tk.alphas, [tk.u_hat, tk.U, tk.u, tk.u_f],
            c, acc, _norms(state, kind, n), [1.0 if tk.fired else 0.0],
        ))
        rows = k + 1
        if k == samples - 1:
            break

        u, u_f = tk.u, tk.u_f

        def rhs(tt, z):
            xx = z[:n]
            return np.concatenate((plant_derivative(plant, tt, xx, u), field_fn(state, tt, xx, z[n:], ref, u_f)))

        try:
            z = ode_step(stepper, rhs, t, np.concatenate((x, w)))
        except NumericBlowup as exc:
            blowup, blowup_time = str(exc), exc.t if exc.t is not None else t
            break
        x, w = z[:n], z[n:]

    if blowup is not None:
        log.warning("numeric blowup at t=%.6g: %s", blowup_time, blowup)
    if kind == "baseline":
        events = list(data[:rows, 0])
    return SimTrace(kind, n, dt, float(cfg.time.t_end), cols, data[:rows], events, blowup, blowup_time)
