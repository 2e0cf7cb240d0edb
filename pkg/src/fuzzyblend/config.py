"""Scenario configuration: YAML schema, strict validation, defaults.

Schema (every key optional unless noted)::

    turbine:            # overrides of TurbineParams fields
      T_g_min: 4068.38
    aero_table: cp.csv  # tabulated cP/cT surface, else the parametric default
    wind:               # required
      type: turbulent   # constant | step | ramp | gust | turbulent | file
      mean: 11.0
      intensity: 0.08
      seed: 7           # falls back to the top-level seed
      cutoff_freq: 0.1
    controller: blended # blended | hard_switch | baseline_kappa
    blending:
      eps_omega: 0.1
      eps_Tg: 0.1
      ramp_shape: linear          # linear | smoothstep
      torque_weighting: gated_sector
      torque_premise: command     # command | previous
      pinned_vertex: null         # 1..4 freezes the filter at F_m (diagnostics)
    observer: {pole: 2.5, tau_v: 0.25}
    reference: {tau_f: 2.0}
    integrator: {bound: 10.0}
    design:
      partial_weights: {q_omega: 6, q_beta: 0, q_I: 0.25, r: 1}
      full_weights: {q_omega: 10, q_beta: 0, q_I: 10, r: 1}
      partial_omega: [lo, hi]     # envelope corners, turbine-derived if absent
      partial_v: [lo, hi]
      full_omega: [lo, hi]
      full_beta: [lo, hi]
      full_v: [lo, hi]
    controller_file: gains.yaml   # reuse dumped gains instead of synthesizing
    dt: 0.01
    duration: 60.0                # required
    output: run.csv
    seed: 0

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import wind as windmod
from .blending import TORQUE_WEIGHTINGS
from .control import DesignConfig, LqrWeights
from .fuzzy import RampPair
from .turbine import MAX_DT, TurbineParams

CONTROLLERS = ("blended", "hard_switch", "baseline_kappa")
TORQUE_PREMISES = ("command", "previous")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BlendingConfig:
    eps_omega: float = 0.1
    eps_Tg: float = 0.1
    ramp_shape: str = "linear"
    torque_weighting: str = "gated_sector"
    torque_premise: str = "command"
    pinned_vertex: int | None = None


@dataclass(frozen=True)
class ObserverConfig:
    pole: float = 2.5
    tau_v: float = 0.25


@dataclass(frozen=True)
class ScenarioConfig:
    wind: windmod.WindProfile
    duration: float
    dt: float = 0.01
    controller: str = "blended"
    turbine: TurbineParams = field(default_factory=TurbineParams)
    blending: BlendingConfig = field(default_factory=BlendingConfig)
    observer: ObserverConfig = field(default_factory=ObserverConfig)
    tau_f: float = 2.0
    integrator_bound: float = 10.0
    design: DesignConfig = field(default_factory=DesignConfig)
    aero_table: str | None = None
    controller_file: str | None = None
    output: str | None = None
    seed: int = 0

    def __post_init__(self):
        validate(self)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


def validate(cfg: ScenarioConfig) -> None:
    if not (math.isfinite(cfg.dt) and 0.0 < cfg.dt <= MAX_DT):
        raise ConfigError(f"dt must lie in (0, {MAX_DT}], got {cfg.dt}")
    if not (math.isfinite(cfg.duration) and cfg.duration >= 10 * cfg.dt * (1 - 1e-12)):
        raise ConfigError(f"duration must be at least 10 * dt, got {cfg.duration}")
    if cfg.controller not in CONTROLLERS:
        raise ConfigError(f"controller must be one of {CONTROLLERS}, got {cfg.controller!r}")
    b = cfg.blending
    for name in ("eps_omega", "eps_Tg"):
        if not 0.0 < getattr(b, name) <= 0.5:
            raise ConfigError(f"blending.{name} must lie in (0, 0.5]")
    if b.ramp_shape not in RampPair.SHAPES:
        raise ConfigError(f"blending.ramp_shape must be one of {RampPair.SHAPES}")
    if b.torque_weighting not in TORQUE_WEIGHTINGS:
        raise ConfigError(f"blending.torque_weighting must be one of {TORQUE_WEIGHTINGS}")
    if b.torque_premise not in TORQUE_PREMISES:
        raise ConfigError(f"blending.torque_premise must be one of {TORQUE_PREMISES}")
    if b.pinned_vertex is not None and b.pinned_vertex not in (1, 2, 3, 4):
        raise ConfigError("blending.pinned_vertex must be 1, 2, 3 or 4")
    if not cfg.observer.pole > 0 or cfg.observer.tau_v < 0:
        raise ConfigError("observer.pole must be positive and observer.tau_v nonnegative")
    if cfg.tau_f < 0:
        raise ConfigError("reference.tau_f must be nonnegative")
    if not cfg.integrator_bound > 0:
        raise ConfigError("integrator.bound must be positive")
    try:
        windmod.validate_profile(cfg.wind)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _check_keys(section: str, data, allowed) -> dict:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{section or 'config'} must be a mapping")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        where = f" in {section}" if section else ""
        raise ConfigError(f"unknown key(s) {unknown}{where}")
    return data


def _number(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _resolve(path, base: Path | None) -> str:
    p = Path(path)
    return str(p if p.is_absolute() or base is None else base / p)


_WIND_FIELDS = {
    "constant": (windmod.Constant, ("v",)),
    "step": (windmod.Step, ("v0", "v1", "t_step")),
    "ramp": (windmod.Ramp, ("v0", "v1", "t_start", "t_end")),
    "gust": (windmod.Gust, ("base", "amplitude", "period", "t_start")),
    "turbulent": (windmod.Turbulent, ("mean", "intensity", "seed", "cutoff_freq")),
    "file": (windmod.FileTrace, ("path",)),
}


def _parse_wind(data, seed: int, base: Path | None) -> windmod.WindProfile:
    if not isinstance(data, dict) or "type" not in data:
        raise ConfigError("wind must be a mapping with a 'type' key")
    kind = data["type"]
    if kind not in _WIND_FIELDS:
        raise ConfigError(f"wind.type must be one of {sorted(_WIND_FIELDS)}, got {kind!r}")
    cls, names = _WIND_FIELDS[kind]
    values = {k: v for k, v in _check_keys("wind", data, ("type",) + names).items() if k != "type"}
    if kind == "file":
        if "path" not in values:
            raise ConfigError("wind.path is required for a file trace")
        return windmod.FileTrace(_resolve(values["path"], base))
    if kind == "turbulent":
        values.setdefault("seed", seed)
        if isinstance(values["seed"], bool) or not isinstance(values["seed"], int):
            raise ConfigError("wind.seed must be an integer")
    kwargs = {k: (v if k == "seed" else _number("wind", k, v)) for k, v in values.items()}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"wind ({kind}): {exc}") from None


def _parse_weights(section: str, data) -> LqrWeights:
    data = _check_keys(section, data, ("q_omega", "q_beta", "q_I", "r"))
    missing = [k for k in ("q_omega", "q_beta", "q_I", "r") if k not in data]
    if missing:
        raise ConfigError(f"{section} is missing {missing}")
    return LqrWeights(**{k: _number(section, k, v) for k, v in data.items()})


def _parse_design(data) -> DesignConfig:
    corners = ("partial_omega", "partial_v", "full_omega", "full_beta", "full_v")
    data = _check_keys("design", data, corners + ("partial_weights", "full_weights"))
    kwargs = {}
    for key in corners:
        if key in data:
            pair = data[key]
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise ConfigError(f"design.{key} must be a [lo, hi] pair")
            lo, hi = (_number("design", key, x) for x in pair)
            if not lo < hi:
                raise ConfigError(f"design.{key} needs lo < hi")
            kwargs[key] = (lo, hi)
    for key in ("partial_weights", "full_weights"):
        if key in data:
            kwargs[key] = _parse_weights(f"design.{key}", data[key])
    return DesignConfig(**kwargs)


TOP_KEYS = ("turbine", "aero_table", "wind", "controller", "blending", "observer", "reference",
            "integrator", "design", "controller_file", "dt", "duration", "output", "seed")


def config_from_dict(data, base: Path | None = None) -> ScenarioConfig:
    data = _check_keys("", data, TOP_KEYS)
    for key in ("wind", "duration"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed must be an integer")

    turbine_fields = {f.name for f in dataclasses.fields(TurbineParams)}
    overrides = _check_keys("turbine", data.get("turbine"), turbine_fields)
    try:
        turbine = TurbineParams(**{k: _number("turbine", k, v) for k, v in overrides.items()})
    except ValueError as exc:
        raise ConfigError(f"turbine: {exc}") from None

    blend = _check_keys("blending", data.get("blending"),
                        [f.name for f in dataclasses.fields(BlendingConfig)])
    blend = {k: (_number("blending", k, v) if k.startswith("eps") else v) for k, v in blend.items()}
    obs = _check_keys("observer", data.get("observer"), ("pole", "tau_v"))
    ref = _check_keys("reference", data.get("reference"), ("tau_f",))
    integ = _check_keys("integrator", data.get("integrator"), ("bound",))

    optional_paths = {k: _resolve(data[k], base) if data.get(k) is not None else None
                      for k in ("aero_table", "controller_file")}
    output = data.get("output")
    return ScenarioConfig(
        wind=_parse_wind(data["wind"], seed, base),
        duration=_number("", "duration", data["duration"]),
        dt=_number("", "dt", data.get("dt", 0.01)),
        controller=data.get("controller", "blended"),
        turbine=turbine,
        blending=BlendingConfig(**blend),
        observer=ObserverConfig(**{k: _number("observer", k, v) for k, v in obs.items()}),
        tau_f=_number("reference", "tau_f", ref.get("tau_f", 2.0)),
        integrator_bound=_number("integrator", "bound", integ.get("bound", 10.0)),
        design=_parse_design(data.get("design")),
        output=str(output) if output is not None else None,
        seed=seed,
        **optional_paths,
    )


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return config_from_dict(data, base=path.parent)
