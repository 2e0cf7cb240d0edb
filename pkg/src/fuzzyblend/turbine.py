"""Reduced-order wind turbine: rigid drive train, pitch actuator, tower mode.

State is ``(omega_r, beta, x_T, x_T_dot)``.  Inputs are the generator torque
(generator side) and the collective pitch reference.  Defaults describe the
public 5 MW reference turbine.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .aero import AeroDomainError, ParametricAero

MAX_DT = 0.05


class IntegrationDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TurbineParams:
    R: float = 63.0
    rho: float = 1.225
    J: float = 43_784_725.0  # rotor 38 759 228 + generator 534.116 * 97**2
    n_g: float = 97.0
    omega_r_rated: float = 1.267
    T_g_rated: float = 40_683.8
    T_g_min: float = 4_068.38
    P_rated: float = 5.0e6
    lambda_opt: float = 7.55
    cp_max: float = 0.482
    v_cut_in: float = 3.0
    v_rated: float = 11.4
    v_cut_out: float = 25.0
    pitch_rate_max: float = math.radians(8.0)
    pitch_tau: float = 0.2
    pitch_min: float = 0.0
    pitch_max: float = math.radians(30.0)
    tower_mass: float = 4.37e5
    tower_stiffness: float = 1.81e6
    tower_damping: float = 8.9e4
    power_tolerance: float = 0.02

    def __post_init__(self):
        positive = ("R", "rho", "J", "n_g", "omega_r_rated", "T_g_rated", "T_g_min",
                    "P_rated", "lambda_opt", "cp_max", "v_cut_in", "v_rated",
                    "v_cut_out", "pitch_rate_max", "pitch_tau", "tower_mass",
                    "tower_stiffness", "tower_damping")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value}")
        if not self.T_g_min < self.T_g_rated:
            raise ValueError("T_g_min must be below T_g_rated")
        if not 0.0 < self.cp_max < 16.0 / 27.0:
            raise ValueError("cp_max must lie strictly between 0 and the Betz limit")
        if not self.v_cut_in < self.v_rated < self.v_cut_out:
            raise ValueError("wind speeds must satisfy v_cut_in < v_rated < v_cut_out")
        if not self.pitch_min < self.pitch_max:
            raise ValueError("pitch_min must be below pitch_max")
        rated = generator_power(self.T_g_rated, self.n_g * self.omega_r_rated)
        if abs(rated - self.P_rated) > self.power_tolerance * self.P_rated:
            raise ValueError(
                f"rated torque and speed give {rated:.4g} W, "
                f"inconsistent with P_rated={self.P_rated:.4g} W")

    @property
    def omega_floor(self) -> float:
        return 0.05 * self.omega_r_rated

    @property
    def area(self) -> float:
        return math.pi * self.R ** 2

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TurbineState:
    omega_r: float
    beta: float = 0.0
    x_T: float = 0.0
    x_T_dot: float = 0.0


def default_aero(params: TurbineParams) -> ParametricAero:
    return ParametricAero(params.lambda_opt, params.cp_max)


def tip_speed_ratio(omega_r: float, v: float, R: float) -> float:
    if not v > 0.0:
        raise ValueError(f"wind speed must be positive, got {v}")
    return omega_r * R / v


def generator_power(T_g: float, omega_g: float) -> float:
    return T_g * omega_g


def wind_power(v: float, params: TurbineParams) -> float:
    return 0.5 * params.rho * params.area * v ** 3


def aero_torque(omega_r: float, beta: float, v: float, params: TurbineParams, aero) -> float:
    """Rotor-side aerodynamic torque; speeds below the floor use the floor."""
    omega = max(omega_r, params.omega_floor)
    lam = tip_speed_ratio(omega, v, params.R)
    return wind_power(v, params) * aero.cp(lam, beta) / omega


def aero_thrust(omega_r: float, beta: float, v: float, params: TurbineParams, aero) -> float:
    omega = max(omega_r, params.omega_floor)
    lam = tip_speed_ratio(omega, v, params.R)
    return 0.5 * params.rho * params.area * v ** 2 * aero.ct(lam, beta)


def pitch_rate(beta: float, beta_ref: float, params: TurbineParams) -> float:
    target = min(max(beta_ref, params.pitch_min), params.pitch_max)
    rate = (target - beta) / params.pitch_tau
    return min(max(rate, -params.pitch_rate_max), params.pitch_rate_max)


def derivatives(x, T_g, beta_ref, v, params, aero):
    omega, beta, x_t, x_t_dot = x
    t_a = aero_torque(omega, beta, v, params, aero)
    f_t = aero_thrust(omega, beta, v, params, aero)
    return (
        (t_a - params.n_g * T_g) / params.J,
        pitch_rate(beta, beta_ref, params),
        x_t_dot,
        (f_t - params.tower_damping * x_t_dot - params.tower_stiffness * x_t) / params.tower_mass,
    )


def step(state: TurbineState, u: tuple[float, float], v: float, dt: float,
         params: TurbineParams, aero) -> TurbineState:
    """Advance one RK4 step with ``u = (T_g, beta_ref)`` and wind ``v`` held."""
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    T_g, beta_ref = u
    x = (state.omega_r, state.beta, state.x_T, state.x_T_dot)

    def f(y):
        return derivatives(y, T_g, beta_ref, v, params, aero)

    try:
        k1 = f(x)
        k2 = f(tuple(a + 0.5 * dt * b for a, b in zip(x, k1)))
        k3 = f(tuple(a + 0.5 * dt * b for a, b in zip(x, k2)))
        k4 = f(tuple(a + dt * b for a, b in zip(x, k3)))
    except AeroDomainError as exc:
        raise IntegrationDiverged(f"stage evaluation failed: {exc}") from None
    new = [a + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
           for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)]
    if not all(math.isfinite(c) for c in new):
        raise IntegrationDiverged(f"non-finite turbine state {new}")
    omega, beta, x_t, x_t_dot = new
    return TurbineState(
        omega_r=max(omega, 0.0),
        beta=min(max(beta, params.pitch_min), params.pitch_max),
        x_T=x_t,
        x_T_dot=x_t_dot,
    )


def equilibrium(v: float, omega_r: float, beta: float, params: TurbineParams, aero):
    """State with the tower at rest under steady thrust, and the holding torque.

    Returns ``(state, T_g)`` such that ``step(state, (T_g, beta), v, dt)``
    leaves the state unchanged.
    """
    t_a = aero_torque(omega_r, beta, v, params, aero)
    f_t = aero_thrust(omega_r, beta, v, params, aero)
    state = TurbineState(omega_r, beta, f_t / params.tower_stiffness, 0.0)
    return state, t_a / params.n_g

