"""
Strict-feedback plant with a time-profiled, non-affine fault.

    x_i' = x_{i+1} + f_i(x_1..x_i),                  i < n
    x_n' = u + f_n(x_1..x_n) + sigma(t - T0) * lambda(x, u)

Nonlinearities, fault terms and reference signals are registered by name so
config files can refer to them; there is no expression parser.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericBlowup, RejectedInput

Nonlinearity = Callable[[np.ndarray], float]
FaultTerm = Callable[[np.ndarray, float], float]


@dataclass(frozen=True)
class FaultModel:
    t0: float
    alpha: float
    lambda_fn: FaultTerm

    def __post_init__(self):
        if not self.alpha > 0:
            raise RejectedInput(f"fault growth rate must be positive, got {self.alpha}")


@dataclass(frozen=True)
class PlantModel:
    n: int
    f: tuple[Nonlinearity, ...]
    fault: FaultModel | None = None

    def __post_init__(self):
        if self.n < 2:
            raise RejectedInput("plant order must be at least 2")
        if len(self.f) != self.n:
            raise RejectedInput(f"expected {self.n} nonlinearities, got {len(self.f)}")
        object.__setattr__(self, "f", tuple(self.f))

    def without_fault(self) -> "PlantModel":
        return PlantModel(self.n, self.f, None)


@dataclass(frozen=True)
class ReferenceSignal:
    y_r: Callable[[float], float]
    y_r_dot: Callable[[float], float]


def fault_profile(t: float, fault: FaultModel) -> float:
    if t < fault.t0:
        return 0.0
    return 1.0 - math.exp(-fault.alpha * (t - fault.t0))


def plant_derivative(plant: PlantModel, t: float, x, u: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = plant.n
    if x.shape != (n,):
        raise RejectedInput(f"state has shape {x.shape}, plant order is {n}")
    dx = np.empty(n)
    for i in range(n):
        fi = plant.f[i](x[: i + 1])
        if not math.isfinite(fi):
            raise NumericBlowup("non-finite plant nonlinearity", t=t, index=i + 1)
        dx[i] = fi + (x[i + 1] if i < n - 1 else u)
    if plant.fault is not None:
        sigma = fault_profile(t, plant.fault)
        # skip evaluating lambda before onset so faulted and fault-free runs agree bitwise
        if sigma > 0.0:
            lam = plant.fault.lambda_fn(x, u)
            if not math.isfinite(lam):
                raise NumericBlowup("non-finite fault term", t=t, index=n)
            dx[n - 1] += sigma * lam
    return dx


# -- catalog ---------------------------------------------------------------

NONLINEARITIES: dict[str, Nonlinearity] = {
    "zero": lambda xb: 0.0,
    "x1_sin_x1": lambda xb: xb[0] * math.sin(xb[0]),
    "x2_cos_x1": lambda xb: xb[1] * math.cos(xb[0]),
    "neg_x1": lambda xb: -xb[0],
    "x1_sq": lambda xb: xb[0] * xb[0],
}

FAULT_TERMS: dict[str, FaultTerm] = {
    "zero": lambda x, u: 0.0,
    "coupled_sin_u": lambda x, u: 4.0 * (x[0] * x[1] + math.sin(u)) + 2.0,
    "constant_2": lambda x, u: 2.0,
}

REFERENCES: dict[str, ReferenceSignal] = {
    "zero": ReferenceSignal(lambda t: 0.0, lambda t: 0.0),
    "sin_t": ReferenceSignal(math.sin, math.cos),
    "half_sin_t": ReferenceSignal(lambda t: 0.5 * math.sin(t), lambda t: 0.5 * math.cos(t)),
    "sin_t_plus_cos_half_t": ReferenceSignal(
        lambda t: math.sin(t) + math.cos(0.5 * t),
        lambda t: math.cos(t) - 0.5 * math.sin(0.5 * t),
    ),
}


def _lookup(table: dict, name: str, kind: str):
    try:
        return table[name]
    except KeyError:
        raise ConfigError(f"unknown {kind} {name!r}; known: {', '.join(sorted(table))}") from None


def nonlinearity(name: str) -> Nonlinearity:
    return _lookup(NONLINEARITIES, name, "nonlinearity")


def fault_term(name: str) -> FaultTerm:
    return _lookup(FAULT_TERMS, name, "fault term")


def reference(name: str) -> ReferenceSignal:
    return _lookup(REFERENCES, name, "reference signal")


def build_plant(names: Sequence[str], fault: FaultModel | None = None) -> PlantModel:
    return PlantModel(len(names), tuple(nonlinearity(nm) for nm in names), fault)


def demo_plant() -> PlantModel:
    """Second-order benchmark plant with the fault switching on at t=10 s."""
    return build_plant(
        ["x1_sin_x1", "x2_cos_x1"],
        FaultModel(t0=10.0, alpha=20.0, lambda_fn=FAULT_TERMS["coupled_sin_u"]),
    )
