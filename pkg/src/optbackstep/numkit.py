"""
Small numerical kernel used by the closed-loop simulator.

Contents:
    - Gaussian RBF layouts and evaluation (identifier / critic / actor bases)
    - fixed-step explicit integrators (Euler, classical RK4)
    - second-order low-pass biquad: bilinear design with prewarping and a
      transposed-direct-form-II step

Everything here is deterministic; no adaptive stepping.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NumericBlowup, RejectedInput

DerivativeFn = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class RbfLayout:
    """Gaussian basis with a single shared width.

    ``scale`` optionally divides each input axis before the distance is taken,
    so grids with different extents per axis (states vs. control) can share
    one width. ``None`` means unit scale on every axis.
    """

    centers: np.ndarray
    width: float
    scale: np.ndarray | None = None

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if centers.size == 0:
            raise RejectedInput("RBF layout needs at least one center")
        if not self.width > 0:
            raise RejectedInput(f"RBF width must be positive, got {self.width}")
        self.centers = centers
        self.width = float(self.width)
        if self.scale is not None:
            scale = np.asarray(self.scale, dtype=float).reshape(-1)
            if scale.shape[0] != centers.shape[1] or np.any(scale <= 0):
                raise RejectedInput("RBF axis scale must be positive, one entry per input axis")
            self.scale = scale
        self._inv = 1.0 / (self.width * (1.0 if self.scale is None else self.scale))

    @property
    def count(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @classmethod
    def grid(cls, bounds: Sequence[tuple[float, float]], points: Sequence[int]) -> "RbfLayout":
        """Uniform tensor grid; width equals the grid spacing on every axis."""
        if len(bounds) != len(points):
            raise RejectedInput("one point count per axis is required")
        axes = []
        spacing = []
        for (lo, hi), m in zip(bounds, points):
            if m < 2 or not hi > lo:
                raise RejectedInput(f"bad grid axis [{lo}, {hi}] with {m} points")
            axes.append(np.linspace(lo, hi, m))
            spacing.append((hi - lo) / (m - 1))
        centers = np.array(list(itertools.product(*axes)), dtype=float)
        spacing = np.asarray(spacing)
        if np.allclose(spacing, spacing[0]):
            return cls(centers, float(spacing[0]))
        return cls(centers, 1.0, scale=spacing)


def rbf_eval(layout: RbfLayout, x) -> np.ndarray:
    """Basis vector ``exp(-||x - c_j||^2 / width^2)`` for every center ``c_j``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != layout.dim:
        raise RejectedInput(f"RBF input has dimension {x.shape[0]}, layout expects {layout.dim}")
    d = (x - layout.centers) * layout._inv
    return np.exp(-np.einsum("ij,ij->i", d, d))


@dataclass(frozen=True)
class OdeStepper:
    method: str = "rk4"
    dt: float = 1e-3

    def __post_init__(self):
        if self.method not in ("euler", "rk4"):
            raise RejectedInput(f"unknown integration method {self.method!r}")
        if not self.dt > 0:
            raise RejectedInput(f"dt must be positive, got {self.dt}")


def _checked(v: np.ndarray, t: float) -> np.ndarray:
    if not np.all(np.isfinite(v)):
        raise NumericBlowup("non-finite value in integrator", t=t)
    return v


def ode_step(stepper: OdeStepper, f: DerivativeFn, t: float, x) -> np.ndarray:
    """Advance ``x`` by one step of ``stepper.dt``."""
    x = np.asarray(x, dtype=float)
    h = stepper.dt
    k1 = _checked(np.asarray(f(t, x), dtype=float), t)
    if stepper.method == "euler":
        return _checked(x + h * k1, t)
    k2 = _checked(np.asarray(f(t + 0.5 * h, x + 0.5 * h * k1), dtype=float), t)
    k3 = _checked(np.asarray(f(t + 0.5 * h, x + 0.5 * h * k2), dtype=float), t)
    k4 = _checked(np.asarray(f(t + h, x + h * k3), dtype=float), t)
    return _checked(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t)


@dataclass
class Biquad:
    b0: float
    b1: float
    b2: float
    a1: float
    a2: float
    s1: float = field(default=0.0)
    s2: float = field(default=0.0)

    @property
    def dc_gain(self) -> float:
        return (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)

    def reset(self, value: float = 0.0) -> None:
        """Put the filter in steady state for a constant input ``value``."""
        self.s1 = value * (1.0 - self.b0)
        self.s2 = value * (self.b2 - self.a2)

    def response(self, omega: float, dt: float) -> complex:
        """Discrete frequency response at angular frequency ``omega`` (rad/s)."""
        z1 = np.exp(-1j * omega * dt)
        return (self.b0 + self.b1 * z1 + self.b2 * z1 * z1) / (1.0 + self.a1 * z1 + self.a2 * z1 * z1)


def butterworth2_design(coeff_mid: float, cutoff: float, dt: float) -> Biquad:
    """Discretize ``1 / (s^2 + coeff_mid*s + 1)`` scaled to ``cutoff`` rad/s.

    Bilinear transform prewarped at the cutoff, so the discrete magnitude at
    ``cutoff`` equals the prototype's magnitude at 1 rad/s exactly.
    """
    if not (coeff_mid > 0 and cutoff > 0 and dt > 0):
        raise RejectedInput("coeff_mid, cutoff and dt must all be positive")
    if cutoff >= math.pi / dt:
        raise RejectedInput(f"cutoff {cutoff} rad/s is at or above Nyquist {math.pi / dt:.6g} rad/s")
    k = math.tan(0.5 * cutoff * dt)
    k2 = k * k
    d0 = 1.0 + coeff_mid * k + k2
    return Biquad(
        b0=k2 / d0,
        b1=2.0 * k2 / d0,
        b2=k2 / d0,
        a1=2.0 * (k2 - 1.0) / d0,
        a2=(1.0 - coeff_mid * k + k2) / d0,
    )


def biquad_step(filt: Biquad, value: float) -> float:
    """One transposed-direct-form-II sample; updates ``filt`` in place."""
    if not math.isfinite(value):
        raise NumericBlowup("non-finite filter input")
    y = filt.b0 * value + filt.s1
    filt.s1 = filt.b1 * value - filt.a1 * y + filt.s2
    filt.s2 = filt.b2 * value - filt.a2 * y
    return y
