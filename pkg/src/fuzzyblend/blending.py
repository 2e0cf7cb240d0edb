"""Fuzzy coupling filter joining the torque and pitch laws into one controller.

The filter is diagonal, ``F = diag(f1(omega_r), f2(T_g))``, applied to
``(beta_ref, T_g)``.  ``f1`` gates the pitch command in over an overlap band
below rated speed.  ``f2`` lives in the sector ``[1, T_max / T_min]``, whose
upper bound turns any torque in the sector into rated torque.  Both are
written as convex sums over the four corner matrices ``F1..F4``.

Torque weighting modes for ``(w12, w22)``:

``gated_sector``
    ``w22 = s(T_g) * e2(T_g)`` with ``s`` the overlap ramp and ``e2`` the
    exact sector weight of ``T_max / T_g``; the filtered torque is then
    ``(1 - s) T_g + s T_max``.
``ramp``
    ``w22 = s(T_g)`` directly.
``exact``
    ``w22 = e2(T_g)``: the pure sector representation, always ``T_max``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .control import PdcController
from .fuzzy import (RampPair, SectorBounds, convex_combine, exact_sector_weights,
                    product_memberships, ramp_weights)
from .turbine import TurbineParams

TORQUE_WEIGHTINGS = ("gated_sector", "ramp", "exact")


@dataclass(frozen=True)
class CouplingFilter:
    ramp_omega: RampPair
    ramp_Tg: RampPair
    T_g_max: float
    T_g_min: float
    torque_weighting: str = "gated_sector"

    def __post_init__(self):
        if self.torque_weighting not in TORQUE_WEIGHTINGS:
            raise ValueError(f"unknown torque weighting {self.torque_weighting!r}")
        if not 0.0 < self.T_g_min < self.T_g_max:
            raise ValueError("need 0 < T_g_min < T_g_max")

    @classmethod
    def from_params(cls, params: TurbineParams, eps_omega: float = 0.1, eps_Tg: float = 0.1,
                    shape: str = "linear", torque_weighting: str = "gated_sector"):
        return cls(
            ramp_omega=RampPair.from_overlap(params.omega_r_rated, eps_omega, shape),
            ramp_Tg=RampPair.from_overlap(params.T_g_rated, eps_Tg, shape),
            T_g_max=params.T_g_rated,
            T_g_min=params.T_g_min,
            torque_weighting=torque_weighting,
        )

    @property
    def sector1(self) -> SectorBounds:
        return SectorBounds(0.0, 1.0)

    @property
    def sector2(self) -> SectorBounds:
        return SectorBounds(1.0, self.T_g_max / self.T_g_min)

    @property
    def vertices(self) -> list[np.ndarray]:
        """``F1..F4`` in membership order."""
        s1, s2 = self.sector1, self.sector2
        return [np.diag([s1.lower, s2.lower]), np.diag([s1.lower, s2.upper]),
                np.diag([s1.upper, s2.lower]), np.diag([s1.upper, s2.upper])]


def omega_weights(filt: CouplingFilter, omega_r: float) -> tuple[float, float]:
    return ramp_weights(omega_r, filt.ramp_omega)


def torque_sector_weights(filt: CouplingFilter, T_g: float) -> tuple[float, float]:
    """Exact sector weights of ``T_max / T_g``, torque clipped into the sector."""
    T = min(max(T_g, filt.T_g_min), filt.T_g_max)
    return exact_sector_weights(filt.T_g_max / T, filt.sector2)


def torque_weights(filt: CouplingFilter, T_g: float) -> tuple[float, float]:
    mode = filt.torque_weighting
    if mode == "ramp":
        return ramp_weights(T_g, filt.ramp_Tg)
    if mode == "exact":
        return torque_sector_weights(filt, T_g)
    s = ramp_weights(T_g, filt.ramp_Tg)[1]
    w22 = s * torque_sector_weights(filt, T_g)[1]
    return 1.0 - w22, w22


def coupling_memberships(filt: CouplingFilter, omega_r: float, T_g: float) -> np.ndarray:
    """``(w11 w12, w11 w22, w21 w12, w21 w22)``."""
    return product_memberships(omega_weights(filt, omega_r), torque_weights(filt, T_g))


def filter_diagonal(filt: CouplingFilter, omega_r: float, T_g: float) -> tuple[float, float]:
    """``(f1, f2)`` straight from the per-variable weights."""
    w11, w21 = omega_weights(filt, omega_r)
    w12, w22 = torque_weights(filt, T_g)
    s1, s2 = filt.sector1, filt.sector2
    return w11 * s1.lower + w21 * s1.upper, w12 * s2.lower + w22 * s2.upper


def filter_matrix(filt: CouplingFilter, omega_r: float, T_g: float) -> np.ndarray:
    """``sum_m h_m F_m``."""
    return convex_combine(coupling_memberships(filt, omega_r, T_g), filt.vertices)


def apply_coupling(filt: CouplingFilter, beta_ref: float, T_g: float, omega_r: float,
                   T_premise: float | None = None) -> tuple[float, float]:
    """Filtered ``(beta_ref, T_g)``; the torque premise defaults to ``T_g`` itself."""
    if T_g < 0.0:
        raise ValueError(f"generator torque must be nonnegative, got {T_g}")
    f1, f2 = filter_diagonal(filt, omega_r, T_g if T_premise is None else T_premise)
    return f1 * beta_ref, min(max(f2 * T_g, 0.0), filt.T_g_max)


def multi_region_control(filt: CouplingFilter, ctrl_b: PdcController, ctrl_c: PdcController,
                         dx, x_I, omega_r: float, T_premise: float, beta: float,
                         v_hat: float, saturate: bool = True,
                         h_a=None) -> tuple[float, float]:
    """Triple convex sum over coupling, torque-law and pitch-law memberships.

    ``x_I`` is either the shared integral or a ``(torque, pitch)`` pair.
    Returns ``(T_g_tilde, beta_ref_tilde)``.  With ``saturate`` each region
    law is clipped to its actuator range (a common offset added to all of
    its vertex outputs) and the filtered torque is clipped to rated.
    ``h_a`` overrides the coupling memberships (e.g. to pin one vertex).
    """
    x_b, x_c = (x_I, x_I) if np.isscalar(x_I) else x_I
    if h_a is None:
        h_a = coupling_memberships(filt, omega_r, T_premise)
    h_b = ctrl_b.memberships((omega_r, v_hat))
    h_c = ctrl_c.memberships((omega_r, beta, v_hat))
    u1_v = -(ctrl_b.kx_table @ np.asarray(dx, float)) + ctrl_b.ki_table * x_b
    u2_v = -(ctrl_c.kx_table @ np.asarray(dx, float)) + ctrl_c.ki_table * x_c
    if saturate:
        u1, u2 = h_b @ u1_v, h_c @ u2_v
        u1_v = u1_v + (ctrl_b.saturate(u1) - u1)
        u2_v = u2_v + (ctrl_c.saturate(u2) - u2)
    F = np.array([np.diag(Fm) for Fm in filt.vertices])  # (m, 2)
    # out[k] = sum_{m,i,j} h_a[m] h_b[i] h_c[j] F[m,k] u_k(i, j)
    beta_t = np.einsum("m,i,j,m,j->", h_a, h_b, h_c, F[:, 0], u2_v)
    torque = np.einsum("m,i,j,m,i->", h_a, h_b, h_c, F[:, 1], u1_v)
    if saturate:
        torque = min(max(torque, 0.0), filt.T_g_max)
    return float(torque), float(beta_t)


def hard_switch_control(ctrl_b: PdcController, ctrl_c: PdcController, dx, x_I, omega_r: float,
                        beta: float, v_hat: float, params: TurbineParams) -> tuple[float, float]:
    """Switch on rated speed without hysteresis: torque law below, pitch law above."""
    x_b, x_c = (x_I, x_I) if np.isscalar(x_I) else x_I
    if omega_r < params.omega_r_rated:
        u1 = ctrl_b.saturate(ctrl_b.raw_output(dx, x_b, ctrl_b.memberships((omega_r, v_hat))))
        return u1, 0.0
    u2 = ctrl_c.saturate(ctrl_c.raw_output(dx, x_c, ctrl_c.memberships((omega_r, beta, v_hat))))
    return params.T_g_rated, u2
