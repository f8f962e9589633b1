"""
Conventional adaptive NN backstepping, used as the comparison controller.

Each step uses proportional error feedback plus an identifier that cancels the
unknown nonlinearity:

    alpha_i = -k_i e_i - w_f . E_f(xbar_i)
    w_f'    = Pi (E_f e_i - gamma w_f)

There is no critic/actor and no event trigger: the control is sent to the
actuator every sample. The feedback gains default to the optimal controller's
rho_i so that both achieve comparable tracking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controller import Tick, _check_conditions
from .errors import NumericBlowup, RejectedInput
from .numkit import RbfLayout, rbf_eval
from .plant import ReferenceSignal


@dataclass
class BaselineStep:
    w_f: np.ndarray
    net_f: RbfLayout
    k: float
    gamma: float
    pi_gain: float

    def __post_init__(self):
        self.w_f = np.array(self.w_f, dtype=float).reshape(-1)
        if self.w_f.shape[0] != self.net_f.count:
            raise RejectedInput("identifier weights do not match basis size")

    def violations(self) -> list[str]:
        out = []
        if not self.k > 0:
            out.append(f"k={self.k} must be > 0")
        if not self.gamma > 0:
            out.append(f"gamma={self.gamma} must be > 0")
        if not self.pi_gain > 0:
            out.append(f"pi_gain={self.pi_gain} must be > 0")
        return out


@dataclass
class BaselineState:
    steps: list[BaselineStep]

    def __post_init__(self):
        if len(self.steps) < 2:
            raise RejectedInput("need at least two backstepping steps")
        for i, st in enumerate(self.steps, start=1):
            if st.net_f.dim != i:
                raise RejectedInput(f"baseline step {i} basis must take {i} inputs")
        self._sizes = np.cumsum([0] + [s.net_f.count for s in self.steps])

    @property
    def n(self) -> int:
        return len(self.steps)

    def validate(self, strict: bool = True) -> "BaselineState":
        problems = [f"step {i}: {p}" for i, s in enumerate(self.steps, 1) for p in s.violations()]
        _check_conditions(problems, strict, "baseline gains")
        return self

    def pack_weights(self) -> np.ndarray:
        return np.concatenate([s.w_f for s in self.steps])

    def load_weights(self, vec: np.ndarray) -> None:
        for st, a, b in zip(self.steps, self._sizes[:-1], self._sizes[1:]):
            st.w_f = vec[a:b].copy()


def baseline_virtual_control(step: BaselineStep, e: float, xbar) -> float:
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    if xbar.shape[0] != step.net_f.dim:
        raise RejectedInput(f"xbar has length {xbar.shape[0]}, step expects {step.net_f.dim}")
    return -step.k * e - float(step.w_f @ rbf_eval(step.net_f, xbar))


def _chain(state: BaselineState, t, x, wvec, y_r):
    n = state.n
    errors = np.empty(n)
    alphas = np.empty(n - 1)
    dw = np.empty_like(wvec)
    e = x[0] - y_r
    out = 0.0
    for i, st in enumerate(state.steps):
        a, b = state._sizes[i], state._sizes[i + 1]
        w = wvec[a:b]
        errors[i] = e
        bf = rbf_eval(st.net_f, x[: i + 1])
        out = -st.k * e - float(w @ bf)
        if not math.isfinite(out):
            raise NumericBlowup("non-finite baseline control", t=t, index=i + 1)
        dw[a:b] = st.pi_gain * (bf * e - st.gamma * w)
        if i < n - 1:
            alphas[i] = out
            e = x[i + 1] - out
    return errors, alphas, out, dw


def baseline_weight_field(state: BaselineState, t: float, x, wvec, ref: ReferenceSignal, u_f: float = 0.0):
    return _chain(state, t, np.asarray(x, dtype=float), wvec, ref.y_r(t))[3]


def baseline_tick(state: BaselineState, t: float, x, ref: ReferenceSignal) -> Tick:
    x = np.asarray(x, dtype=float)
    if x.shape != (state.n,) or not np.all(np.isfinite(x)):
        raise NumericBlowup("bad plant state passed to baseline controller", t=t)
    errors, alphas, u, dw = _chain(state, t, x, state.pack_weights(), ref.y_r(t))
    return Tick(u=u, u_hat=u, U=u, u_f=0.0, fired=True, errors=errors, alphas=alphas, dweights=dw)
