"""Effective wind speed observer.

An extended-state observer on the rotor equation ``J dw/dt = T_a - n_g T_g``
estimates the aerodynamic torque; the static aerodynamics are then inverted
for wind speed by bisection and the result is low-pass filtered.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .turbine import TurbineParams, aero_torque

log = logging.getLogger(__name__)

BISECT_TOL = 1e-3
BISECT_MAX_ITER = 60


@dataclass(frozen=True)
class ObserverState:
    omega_hat: float
    T_a_hat: float
    v_hat: float
    v_raw: float | None = None
    inversion_failed: bool = False


def eso_gains(params: TurbineParams, pole: float) -> tuple[float, float]:
    """Gains placing both error-dynamics poles at ``-pole``."""
    return 2.0 * pole, params.J * pole ** 2


def error_dynamics(params: TurbineParams, l1: float, l2: float) -> np.ndarray:
    return np.array([[-l1, 1.0 / params.J], [-l2, 0.0]])


class WindObserver:
    """Stateful observer; one instance per simulation.

    ``pole`` [rad/s] sets the ESO bandwidth, ``tau_v`` [s] the output filter.
    """

    def __init__(self, params: TurbineParams, aero, pole: float = 2.5, tau_v: float = 0.25,
                 dt: float | None = None):
        self.params = params
        self.aero = aero
        self.l1, self.l2 = eso_gains(params, pole)
        self.tau_v = tau_v
        self.v_lo = 0.5 * params.v_cut_in
        self.v_hi = 2.0 * params.v_rated
        eig = np.linalg.eigvals(error_dynamics(params, self.l1, self.l2))
        if np.any(eig.real >= 0):
            raise ValueError(f"observer error dynamics unstable, eigenvalues {eig}")
        if dt is not None:
            disc = np.linalg.eigvals(np.eye(2) + dt * error_dynamics(params, self.l1, self.l2))
            if np.any(np.abs(disc) >= 1.0):
                raise ValueError(f"observer pole {pole} too fast for dt={dt}")
        self.state: ObserverState | None = None

    def initialize(self, omega_r: float, beta: float, v: float) -> ObserverState:
        v = min(max(v, self.v_lo), self.v_hi)
        t_a = aero_torque(omega_r, beta, v, self.params, self.aero)
        self.state = ObserverState(omega_r, t_a, v, v)
        return self.state

    def invert(self, T_a: float, omega_r: float, beta: float) -> float | None:
        """Wind speed giving aerodynamic torque ``T_a``; ``None`` without a sign change."""
        def g(v):
            return aero_torque(omega_r, beta, v, self.params, self.aero) - T_a

        lo, hi = self.v_lo, self.v_hi
        g_lo, g_hi = g(lo), g(hi)
        if g_lo * g_hi > 0.0:
            return None
        for _ in range(BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            g_mid = g(mid)
            if (g_mid <= 0.0) == (g_lo <= 0.0):
                lo, g_lo = mid, g_mid
            else:
                hi = mid
            if hi - lo < BISECT_TOL:
                break
        return 0.5 * (lo + hi)

    def update(self, omega_g_meas: float, T_g: float, beta: float, dt: float) -> ObserverState:
        if not dt > 0.0:
            raise ValueError(f"dt must be positive, got {dt}")
        s = self.state
        p = self.params
        omega_meas = omega_g_meas / p.n_g
        innov = omega_meas - s.omega_hat
        omega_hat = s.omega_hat + dt * ((s.T_a_hat - p.n_g * T_g) / p.J + self.l1 * innov)
        T_a_hat = s.T_a_hat + dt * self.l2 * innov

        v_raw = self.invert(T_a_hat, max(omega_meas, p.omega_floor), beta)
        failed = v_raw is None
        if failed:
            log.debug("wind inversion bracket has no sign change; holding estimate")
            v_raw = s.v_raw if s.v_raw is not None else s.v_hat
        alpha = 1.0 - math.exp(-dt / self.tau_v) if self.tau_v > 0 else 1.0
        v_hat = min(max(s.v_hat + alpha * (v_raw - s.v_hat), self.v_lo), self.v_hi)
        self.state = replace(s, omega_hat=omega_hat, T_a_hat=T_a_hat, v_hat=v_hat,
                             v_raw=v_raw, inversion_failed=failed)
        return self.state
