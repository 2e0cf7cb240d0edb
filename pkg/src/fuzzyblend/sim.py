"""Closed-loop scenario runner.

Per step: wind sample, observer update with the previously applied torque,
speed reference and its filter, region laws, blending, integrator update,
plant step, log row.  The logged row holds the plant state at the start of
the step together with the commands applied over it.

Each region law owns a copy of the speed-error integral.  The torque copy
integrates the error; the pitch copy integrates it gated by the pitch
membership, so it only moves while the pitch law is active.  Both freeze
while their law is saturated and the error would drive it further out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml
from scipy.optimize import brentq

from .aero import TabulatedAero
from .blending import CouplingFilter, coupling_memberships, filter_diagonal, multi_region_control
from .fuzzy import convex_combine
from .config import ScenarioConfig
from .control import (PdcController, TrackingState, baseline_torque_law, compute_omega_ref,
                      controller_from_dict, controller_to_dict, design_full_load,
                      design_partial_load, filter_reference)
from .estimator import WindObserver
from .timeseries import TimeSeriesLog
from .turbine import (IntegrationDiverged, TurbineParams, TurbineState, aero_torque,
                      default_aero, equilibrium, step)
from .wind import wind_series


class ScenarioDiverged(RuntimeError):
    def __init__(self, step_index: int, reason: str):
        super().__init__(f"diverged at step {step_index}: {reason}")
        self.step_index = step_index


@dataclass
class Controllers:
    partial: PdcController
    full: PdcController

    def to_dict(self) -> dict:
        return {"partial_load": controller_to_dict(self.partial),
                "full_load": controller_to_dict(self.full)}

    @classmethod
    def from_dict(cls, data) -> "Controllers":
        if not isinstance(data, dict) or {"partial_load", "full_load"} - set(data):
            raise ValueError("controller file needs 'partial_load' and 'full_load' entries")
        return cls(controller_from_dict(data["partial_load"]),
                   controller_from_dict(data["full_load"]))

    def dump(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=False))

    @classmethod
    def load(cls, path) -> "Controllers":
        return cls.from_dict(yaml.safe_load(Path(path).read_text()))


def build_aero(cfg: ScenarioConfig):
    if cfg.aero_table:
        return TabulatedAero.from_csv(cfg.aero_table)
    return default_aero(cfg.turbine)


def build_controllers(cfg: ScenarioConfig, aero=None) -> Controllers:
    if cfg.controller_file:
        return Controllers.load(cfg.controller_file)
    aero = aero if aero is not None else build_aero(cfg)
    return Controllers(design_partial_load(cfg.turbine, aero, cfg.design),
                       design_full_load(cfg.turbine, aero, cfg.design))


def operating_point(v: float, params: TurbineParams, aero) -> tuple[TurbineState, float]:
    """Steady state for wind ``v``: optimal tip speed below rated speed, else
    rated speed with the pitch that holds rated torque."""
    omega = params.lambda_opt * v / params.R
    if omega < params.omega_r_rated:
        return equilibrium(v, omega, params.pitch_min, params, aero)
    omega = params.omega_r_rated
    target = params.n_g * params.T_g_rated

    def excess(beta):
        return aero_torque(omega, beta, v, params, aero) - target

    if excess(params.pitch_min) <= 0.0:
        beta = params.pitch_min
    elif excess(params.pitch_max) >= 0.0:
        beta = params.pitch_max
    else:
        beta = brentq(excess, params.pitch_min, params.pitch_max, xtol=1e-12)
    return equilibrium(v, omega, beta, params, aero)


def _conditional_step(x: float, rate: float, k_I: float, u_raw: float, u_min: float,
                      u_max: float, dt: float, bound: float) -> float:
    push = k_I * rate
    if (u_raw >= u_max and push > 0.0) or (u_raw <= u_min and push < 0.0):
        return x
    return min(max(x + dt * rate, -bound), bound)


def run_scenario(cfg: ScenarioConfig, controllers: Controllers | None = None,
                 aero=None) -> TimeSeriesLog:
    params = cfg.turbine
    aero = aero if aero is not None else build_aero(cfg)
    if controllers is None and cfg.controller != "baseline_kappa":
        controllers = build_controllers(cfg, aero)
    dt, n = cfg.dt, cfg.n_steps
    bound = cfg.integrator_bound
    winds = wind_series(cfg.wind, dt, n)
    filt = CouplingFilter.from_params(params, cfg.blending.eps_omega, cfg.blending.eps_Tg,
                                      cfg.blending.ramp_shape, cfg.blending.torque_weighting)
    use_previous = cfg.blending.torque_premise == "previous"
    pinned = None
    if cfg.blending.pinned_vertex is not None:
        pinned = np.zeros(4)
        pinned[cfg.blending.pinned_vertex - 1] = 1.0

    state, T_hold = operating_point(float(winds[0]), params, aero)
    observer = WindObserver(params, aero, cfg.observer.pole, cfg.observer.tau_v, dt=dt)
    obs = observer.initialize(state.omega_r, state.beta, float(winds[0]))
    tracking = TrackingState(omega_ref_f=compute_omega_ref(obs.v_hat, params))

    x_b = x_c = 0.0
    if controllers is not None:
        cb, cc = controllers.partial, controllers.full
        k_bI = float(cb.memberships((state.omega_r, obs.v_hat)) @ cb.ki_table)
        h_c = cc.memberships((state.omega_r, state.beta, obs.v_hat))
        k_cx2 = float(h_c @ cc.kx_table[:, 1])
        k_cI = float(h_c @ cc.ki_table)
        x_b = min(max(T_hold / k_bI, -bound), bound)
        x_c = min(max(state.beta * (1.0 + k_cx2) / k_cI, -bound), bound)

    out = TimeSeriesLog()
    T_applied = T_hold
    for k in range(n):
        t = k * dt
        v = float(winds[k])
        omega, beta = state.omega_r, state.beta
        if k > 0:
            obs = observer.update(params.n_g * omega, T_applied, beta, dt)
        v_hat = obs.v_hat
        tracking = filter_reference(tracking, compute_omega_ref(v_hat, params), dt, cfg.tau_f)
        e = tracking.omega_ref_f - omega
        dx = (-e, beta)

        if cfg.controller == "baseline_kappa":
            T_cmd, beta_cmd = baseline_torque_law(params.n_g * omega, params), 0.0
            h_a, f = (1.0, 0.0, 0.0, 0.0), (0.0, 1.0)
        else:
            h_b = cb.memberships((omega, v_hat))
            h_c = cc.memberships((omega, beta, v_hat))
            u1_raw = cb.raw_output(dx, x_b, h_b)
            u2_raw = cc.raw_output(dx, x_c, h_c)
            if cfg.controller == "blended":
                T_premise = T_applied if use_previous else cb.saturate(u1_raw)
                if pinned is None:
                    h_a = tuple(coupling_memberships(filt, omega, T_premise))
                    f = filter_diagonal(filt, omega, T_premise)
                else:
                    h_a = tuple(pinned)
                    f = tuple(np.diag(convex_combine(pinned, filt.vertices)))
                T_cmd, beta_cmd = multi_region_control(filt, cb, cc, dx, (x_b, x_c), omega,
                                                       T_premise, beta, v_hat, h_a=np.array(h_a))
                gate = f[0]
            elif omega < params.omega_r_rated:
                T_cmd, beta_cmd = cb.saturate(u1_raw), 0.0
                h_a, f, gate = (1.0, 0.0, 0.0, 0.0), (0.0, 1.0), 0.0
            else:
                T_cmd, beta_cmd = params.T_g_rated, cc.saturate(u2_raw)
                h_a, f, gate = (0.0, 0.0, 1.0, 0.0), (1.0, 1.0), 1.0
            x_b = _conditional_step(x_b, e, float(h_b @ cb.ki_table), u1_raw,
                                    cb.u_min, cb.u_max, dt, bound)
            x_c = _conditional_step(x_c, gate * e, float(h_c @ cc.ki_table), u2_raw,
                                    cc.u_min, cc.u_max, dt, bound)

        if not (math.isfinite(T_cmd) and math.isfinite(beta_cmd)):
            raise ScenarioDiverged(k, "non-finite actuator command")
        out.append((t, v, v_hat, omega, tracking.omega_ref_f, beta, beta_cmd, T_cmd,
                     T_cmd * params.n_g * omega / params.P_rated, state.x_T,
                     x_b, x_c, *h_a, *f))
        try:
            state = step(state, (T_cmd, beta_cmd), v, dt, params, aero)
        except IntegrationDiverged as exc:
            raise ScenarioDiverged(k, str(exc)) from None
        T_applied = T_cmd
    if out.as_array().size and not np.all(np.isfinite(out.as_array())):
        raise ScenarioDiverged(n - 1, "non-finite log entry")
    return out
