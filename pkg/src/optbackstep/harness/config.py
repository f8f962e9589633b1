"""
Simulation config: a nested YAML mapping.

Top-level keys (all optional; missing keys take the benchmark defaults)::

    controller: optimal_et | baseline
    strict: true                # enforce gain conditions, reject unknown keys
    seed: 0                     # only used by randomized tests
    time:      {dt: 0.001, t_end: 20.0, method: rk4}
    plant:
      nonlinearities: [x1_sin_x1, x2_cos_x1]   # catalog names, one per state
      initial_state: [0.0, 0.0]
      fault: {enabled: true, t0: 10.0, alpha: 20.0, lambda: coupled_sin_u}
    reference: sin_t            # catalog name
    steps:                      # one entry per backstepping step
      - {rho: 40, gamma: 3, eps_c: 15, eps_a: 18, pi: 15}
      - {rho: 50, gamma: 3, eps_c: 15, eps_a: 18, pi: 20}
    initial_weight: 0.3         # every identifier/critic/actor weight at t=0
    trigger:   {beta: 0.2, theta: 4, zeta: 3, v: 0.2}
    filter:    {coeff_mid: 1.141, cutoff: 10.0}
    rbf:       {state_bounds: [-2, 2], state_points: 5,
                error_bounds: [-2, 2], error_points: 5,
                control_bounds: [-30, 30], control_points: 5}
    baseline:  {gains: null}    # null -> k_i = rho_i
    output:    {dir: out, trace: trace.csv, metrics: metrics.json, figures: true}

Unknown keys raise ConfigError in strict mode and are logged otherwise.
"""
from __future__ import annotations

import copy
import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from ..errors import ConfigError
from ..plant import FAULT_TERMS, NONLINEARITIES, REFERENCES

log = logging.getLogger(__name__)

CONTROLLER_KINDS = ("optimal_et", "baseline")


@dataclass
class TimeSpec:
    dt: float = 1e-3
    t_end: float = 20.0
    method: str = "rk4"


@dataclass
class FaultSpec:
    enabled: bool = True
    t0: float = 10.0
    alpha: float = 20.0
    # "lambda" is a Python keyword; the YAML key maps onto this field
    lambda_: str = "coupled_sin_u"


@dataclass
class PlantSpec:
    nonlinearities: list = field(default_factory=lambda: ["x1_sin_x1", "x2_cos_x1"])
    initial_state: list = field(default_factory=lambda: [0.0, 0.0])
    fault: FaultSpec = field(default_factory=FaultSpec)


@dataclass
class StepSpec:
    rho: float
    gamma: float = 3.0
    eps_c: float = 15.0
    eps_a: float = 18.0
    pi: float = 15.0


@dataclass
class TriggerSpec:
    beta: float = 0.2
    theta: float = 4.0
    zeta: float = 3.0
    v: float = 0.2


@dataclass
class FilterSpec:
    coeff_mid: float = 1.141
    cutoff: float = 10.0


@dataclass
class RbfSpec:
    state_bounds: list = field(default_factory=lambda: [-2.0, 2.0])
    state_points: int = 5
    error_bounds: list = field(default_factory=lambda: [-2.0, 2.0])
    error_points: int = 5
    control_bounds: list = field(default_factory=lambda: [-30.0, 30.0])
    control_points: int = 5


@dataclass
class BaselineSpec:
    gains: list | None = None


@dataclass
class OutputSpec:
    dir: str = "out"
    trace: str = "trace.csv"
    metrics: str = "metrics.json"
    figures: bool = True


def _demo_steps():
    return [StepSpec(rho=40.0, pi=15.0), StepSpec(rho=50.0, pi=20.0)]


@dataclass
class SimConfig:
    controller: str = "optimal_et"
    strict: bool = True
    seed: int = 0
    time: TimeSpec = field(default_factory=TimeSpec)
    plant: PlantSpec = field(default_factory=PlantSpec)
    reference: str = "sin_t"
    steps: list = field(default_factory=_demo_steps)
    initial_weight: float = 0.3
    trigger: TriggerSpec = field(default_factory=TriggerSpec)
    filter: FilterSpec = field(default_factory=FilterSpec)
    rbf: RbfSpec = field(default_factory=RbfSpec)
    baseline: BaselineSpec = field(default_factory=BaselineSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    @property
    def n(self) -> int:
        return len(self.plant.nonlinearities)

    @property
    def sample_count(self) -> int:
        return int(self.time.t_end / self.time.dt + 1e-9) + 1

    def replace(self, **changes) -> "SimConfig":
        out = copy.deepcopy(self)
        for k, v in changes.items():
            setattr(out, k, v)
        return out


_NESTED = {
    (SimConfig, "time"): TimeSpec,
    (SimConfig, "plant"): PlantSpec,
    (SimConfig, "trigger"): TriggerSpec,
    (SimConfig, "filter"): FilterSpec,
    (SimConfig, "rbf"): RbfSpec,
    (SimConfig, "baseline"): BaselineSpec,
    (SimConfig, "output"): OutputSpec,
    (PlantSpec, "fault"): FaultSpec,
}


def _key(name: str) -> str:
    return name[:-1] if name.endswith("_") else name


def _build(cls, data: Any, path: str, strict: bool):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {type(data).__name__}")
    known = {_key(f.name): f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        msg = f"unknown key(s) at {path or 'top level'}: {', '.join(map(str, unknown))}"
        if strict:
            raise ConfigError(msg)
        log.warning(msg)
    kwargs = {}
    for key, f in known.items():
        if key not in data:
            continue
        value = data[key]
        sub = _NESTED.get((cls, f.name))
        where = f"{path}.{key}" if path else key
        if sub is not None:
            value = _build(sub, value, where, strict)
        elif cls is SimConfig and key == "steps":
            if not isinstance(value, list):
                raise ConfigError("steps: expected a list of gain mappings")
            value = [_build(StepSpec, s, f"steps[{i}]", strict) for i, s in enumerate(value)]
        kwargs[f.name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path or 'config'}: {exc}") from None


def config_from_dict(data: dict) -> SimConfig:
    strict = bool(data.get("strict", True)) if isinstance(data, dict) else True
    cfg = _build(SimConfig, data, "", strict)
    validate_config(cfg)
    return cfg


def config_to_dict(cfg: SimConfig) -> dict:
    def conv(obj):
        if dataclasses.is_dataclass(obj):
            return {_key(f.name): conv(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if isinstance(obj, (list, tuple)):
            return [conv(v) for v in obj]
        return obj

    return conv(cfg)


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    return config_from_dict(data if data is not None else {})


def dump_config(cfg: SimConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))


def set_path(data: dict, dotted: str, value) -> dict:
    """Return a copy of ``data`` with ``dotted`` (e.g. ``trigger.theta``) set."""
    out = copy.deepcopy(data)
    node = out
    parts = dotted.split(".")
    for p in parts[:-1]:
        if isinstance(node, list):
            try:
                node = node[int(p)]
            except (ValueError, IndexError):
                raise ConfigError(f"bad list index {p!r} in {dotted!r}") from None
        elif isinstance(node, dict) and p in node:
            node = node[p]
        else:
            raise ConfigError(f"unknown config path {dotted!r}")
    last = parts[-1]
    if isinstance(node, list):
        try:
            node[int(last)] = value
        except (ValueError, IndexError):
            raise ConfigError(f"bad list index {last!r} in {dotted!r}") from None
    elif isinstance(node, dict) and last in node:
        node[last] = value
    else:
        raise ConfigError(f"unknown config path {dotted!r}")
    return out


def _pair(v, what):
    if not (isinstance(v, (list, tuple)) and len(v) == 2 and float(v[1]) > float(v[0])):
        raise ConfigError(f"{what} must be [low, high] with high > low")


def validate_config(cfg: SimConfig) -> None:
    """Structural checks. Gain conditions are checked when controllers are built."""
    if cfg.controller not in CONTROLLER_KINDS:
        raise ConfigError(f"controller must be one of {CONTROLLER_KINDS}, got {cfg.controller!r}")
    try:
        dt, t_end = float(cfg.time.dt), float(cfg.time.t_end)
    except (TypeError, ValueError):
        raise ConfigError("time.dt and time.t_end must be numbers") from None
    if not dt > 0:
        raise ConfigError(f"time.dt must be positive, got {dt}")
    if not t_end > dt:
        raise ConfigError(f"time.t_end must exceed dt, got {t_end}")
    if cfg.time.method not in ("euler", "rk4"):
        raise ConfigError(f"time.method must be euler or rk4, got {cfg.time.method!r}")
    n = cfg.n
    if n < 2:
        raise ConfigError("plant needs at least two nonlinearities")
    for name in cfg.plant.nonlinearities:
        if name not in NONLINEARITIES:
            raise ConfigError(f"unknown nonlinearity {name!r}; known: {', '.join(sorted(NONLINEARITIES))}")
    if len(cfg.plant.initial_state) != n:
        raise ConfigError(f"plant.initial_state needs {n} entries")
    if cfg.plant.fault.lambda_ not in FAULT_TERMS:
        raise ConfigError(f"unknown fault term {cfg.plant.fault.lambda_!r}")
    if not float(cfg.plant.fault.alpha) > 0:
        raise ConfigError("plant.fault.alpha must be positive")
    if cfg.reference not in REFERENCES:
        raise ConfigError(f"unknown reference {cfg.reference!r}; known: {', '.join(sorted(REFERENCES))}")
    if len(cfg.steps) != n:
        raise ConfigError(f"steps needs {n} entries (one per state), got {len(cfg.steps)}")
    r = cfg.rbf
    _pair(r.state_bounds, "rbf.state_bounds")
    _pair(r.error_bounds, "rbf.error_bounds")
    _pair(r.control_bounds, "rbf.control_bounds")
    for k in ("state_points", "error_points", "control_points"):
        if int(getattr(r, k)) < 2:
            raise ConfigError(f"rbf.{k} must be at least 2")
    if cfg.baseline.gains is not None and len(cfg.baseline.gains) != n:
        raise ConfigError(f"baseline.gains needs {n} entries")
    if not (cfg.filter.coeff_mid > 0 and cfg.filter.cutoff > 0):
        raise ConfigError("filter coeff_mid and cutoff must be positive")


def demo_config() -> SimConfig:
    """The benchmark: second-order plant, sin reference, fault at t=10 s."""
    cfg = SimConfig()
    validate_config(cfg)
    return cfg
