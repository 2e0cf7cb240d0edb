"""Region controllers: reference generation, the two PDC integral state-feedback
laws, their gain design, and the classic k*omega^2 torque law.

Both laws share the state ``dx = (omega_r - omega_ref_f, beta)`` and the
integral ``x_I`` of ``omega_ref_f - omega_r``::

    u = -sum_i h_i k_x,i . dx + sum_i h_i k_I,i x_I
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .fuzzy import RampPair, corner_index, product_memberships, ramp_weights
from .synthesis import VertexGain, linearize_at, synthesize_gains
from .turbine import TurbineParams

MIN_FILTER_TAU = 1e-6


@dataclass(frozen=True)
class Premise:
    """A scheduling variable with the two corner values its memberships span."""

    name: str
    lo: float
    hi: float

    def weights(self, value: float) -> tuple[float, float]:
        return ramp_weights(value, RampPair(self.lo, self.hi))


@dataclass
class PdcController:
    """Parallel distributed compensation over corner vertices.

    ``vertices`` are ordered like :func:`fuzzy.product_memberships` over
    ``premises`` (first premise varies slowest).
    """

    premises: list[Premise]
    vertices: list[VertexGain]
    u_min: float
    u_max: float
    name: str = ""

    def __post_init__(self):
        if len(self.vertices) != 2 ** len(self.premises):
            raise ValueError(
                f"{len(self.premises)} premises need {2 ** len(self.premises)} vertices, "
                f"got {len(self.vertices)}")
        self.kx_table = np.array([v.k_x for v in self.vertices], dtype=float)
        self.ki_table = np.array([v.k_I for v in self.vertices], dtype=float)

    def memberships(self, z) -> np.ndarray:
        if len(z) != len(self.premises):
            raise ValueError(f"expected {len(self.premises)} premise values, got {len(z)}")
        return product_memberships(*(p.weights(x) for p, x in zip(self.premises, z)))

    def blended_gain(self, h) -> tuple[np.ndarray, float]:
        h = np.asarray(h, dtype=float)
        return h @ self.kx_table, float(h @ self.ki_table)

    def raw_output(self, dx, x_I: float, h) -> float:
        """Control law before saturation, for given memberships ``h``."""
        k_x, k_I = self.blended_gain(h)
        return float(-(k_x[0] * dx[0] + k_x[1] * dx[1]) + k_I * x_I)

    def saturate(self, u: float) -> float:
        return min(max(u, self.u_min), self.u_max)


def partial_load_control(ctrl: PdcController, dx, x_I: float, z_b) -> float:
    """Generator torque from the partial-load law, premises ``(omega_r, v_hat)``."""
    return ctrl.saturate(ctrl.raw_output(dx, x_I, ctrl.memberships(z_b)))


def full_load_control(ctrl: PdcController, dx, x_I: float, z_c) -> float:
    """Pitch reference from the full-load law, premises ``(omega_r, beta, v_hat)``."""
    return ctrl.saturate(ctrl.raw_output(dx, x_I, ctrl.memberships(z_c)))


def compute_omega_ref(v_hat: float, params: TurbineParams) -> float:
    """Optimal-tip-speed-ratio rotor speed, capped at rated speed."""
    return min(params.lambda_opt / params.R * max(v_hat, 0.0), params.omega_r_rated)


@dataclass
class TrackingState:
    x_I: float = 0.0
    omega_ref_f: float = 0.0


def filter_reference(tracking: TrackingState, omega_ref: float, dt: float,
                     tau: float = 2.0) -> TrackingState:
    """First-order low-pass of the speed reference, exact for a held input."""
    if tau <= MIN_FILTER_TAU:
        return replace(tracking, omega_ref_f=omega_ref)
    alpha = 1.0 - math.exp(-dt / tau)
    return replace(tracking,
                   omega_ref_f=tracking.omega_ref_f + alpha * (omega_ref - tracking.omega_ref_f))


def kappa(params: TurbineParams) -> float:
    return (0.5 * params.rho * math.pi * params.R ** 5 * params.cp_max
            / (params.lambda_opt ** 3 * params.n_g ** 3))


def baseline_torque_law(omega_g: float, params: TurbineParams) -> float:
    return min(max(kappa(params) * omega_g ** 2, 0.0), params.T_g_rated)


@dataclass
class LqrWeights:
    """Diagonal LQR weights on ``(dx_1, dx_2, x_I)`` and the input."""

    q_omega: float
    q_beta: float
    q_I: float
    r: float

    @property
    def Q(self) -> np.ndarray:
        return np.diag([self.q_omega, self.q_beta, self.q_I])


@dataclass
class DesignConfig:
    """Operating envelope corners and LQR weights for both region laws."""

    partial_omega: tuple[float, float] | None = None
    partial_v: tuple[float, float] | None = None
    full_omega: tuple[float, float] | None = None
    full_beta: tuple[float, float] = (0.0, math.radians(15.0))
    full_v: tuple[float, float] | None = None
    partial_weights: LqrWeights = field(
        default_factory=lambda: LqrWeights(q_omega=6.0, q_beta=0.0, q_I=0.25, r=1.0))
    full_weights: LqrWeights = field(
        default_factory=lambda: LqrWeights(q_omega=10.0, q_beta=0.0, q_I=10.0, r=1.0))

    def resolved(self, params: TurbineParams) -> "DesignConfig":
        """Fill envelope defaults from the turbine parameters."""
        w_rated = params.omega_r_rated
        return replace(
            self,
            partial_omega=self.partial_omega
            or (params.lambda_opt * params.v_cut_in / params.R, w_rated),
            partial_v=self.partial_v or (params.v_cut_in, params.v_rated),
            full_omega=self.full_omega or (0.95 * w_rated, 1.05 * w_rated),
            full_v=self.full_v or (params.v_rated, 14.0),
        )


def _vertex_models(premises, op_of_corner, params, aero, which):
    models, labels = [], []
    for corner in corner_index(len(premises)):
        values = [p.hi if c else p.lo for p, c in zip(premises, corner)]
        A, B_tg, B_beta = linearize_at(op_of_corner(values), params, aero)
        models.append((A, B_tg if which == "torque" else B_beta))
        labels.append(", ".join(f"{p.name}={x:.4g}" for p, x in zip(premises, values)))
    return models, labels


def design_partial_load(params: TurbineParams, aero, design: DesignConfig) -> PdcController:
    """Four-vertex torque law over ``(omega_r, v_hat)``."""
    design = design.resolved(params)
    premises = [Premise("omega_r", *design.partial_omega), Premise("v_hat", *design.partial_v)]
    models, labels = _vertex_models(
        premises, lambda z: (z[0], params.pitch_min, z[1]), params, aero, "torque")
    w = design.partial_weights
    # input normalized to rated torque
    gains = synthesize_gains(models, w.Q, w.r / params.T_g_rated ** 2,
                             torque_region=True, labels=labels)
    return PdcController(premises, gains, 0.0, params.T_g_rated, name="partial_load")


def design_full_load(params: TurbineParams, aero, design: DesignConfig) -> PdcController:
    """Eight-vertex pitch law over ``(omega_r, beta, v_hat)``."""
    design = design.resolved(params)
    premises = [Premise("omega_r", *design.full_omega), Premise("beta", *design.full_beta),
                Premise("v_hat", *design.full_v)]
    models, labels = _vertex_models(premises, lambda z: (z[0], z[1], z[2]), params, aero, "pitch")
    w = design.full_weights
    # input normalized to the pitch span
    gains = synthesize_gains(models, w.Q, w.r / (params.pitch_max - params.pitch_min) ** 2,
                             labels=labels)
    return PdcController(premises, gains, params.pitch_min, params.pitch_max, name="full_load")


def controller_to_dict(ctrl: PdcController) -> dict:
    return {
        "name": ctrl.name,
        "u_min": float(ctrl.u_min),
        "u_max": float(ctrl.u_max),
        "premises": [{"name": p.name, "lo": float(p.lo), "hi": float(p.hi)} for p in ctrl.premises],
        "vertices": [{"k_x": [float(k) for k in v.k_x], "k_I": float(v.k_I)} for v in ctrl.vertices],
    }


def controller_from_dict(data: dict) -> PdcController:
    try:
        premises = [Premise(str(p["name"]), float(p["lo"]), float(p["hi"])) for p in data["premises"]]
        vertices = [VertexGain(tuple(float(k) for k in v["k_x"]), float(v["k_I"]))
                    for v in data["vertices"]]
        return PdcController(premises, vertices, float(data["u_min"]), float(data["u_max"]),
                             name=str(data.get("name", "")))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed controller entry: {exc!r}") from None
