"""Vertex linearization and integral-augmented LQR gain synthesis."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .turbine import TurbineParams, aero_torque

log = logging.getLogger(__name__)


class SynthesisError(RuntimeError):
    pass


@dataclass(frozen=True)
class VertexGain:
    """State-feedback gains on ``(omega_r - omega_ref, beta)`` and the integral gain."""

    k_x: tuple[float, float]
    k_I: float

    def __post_init__(self):
        if not np.all(np.isfinite([*self.k_x, self.k_I])):
            raise ValueError(f"non-finite gain {self}")


def _rotor_accel(omega, beta, T_g, v, params, aero):
    return (aero_torque(omega, beta, v, params, aero) - params.n_g * T_g) / params.J


def linearize_at(op_point, params: TurbineParams, aero, T_g: float | None = None):
    """Finite-difference Jacobians of the (omega_r, beta) dynamics.

    ``op_point`` is ``(omega_r, beta, v)``.  Returns ``(A, B_Tg, B_beta)`` with
    ``A`` 2x2 and the input matrices 2x1.  Steps are ``1e-4`` of each
    variable's scale; central differences are used except where a step would
    leave the pitch range or drop below the speed floor.
    """
    omega, beta, v = op_point
    if T_g is None:
        T_g = params.T_g_rated
    h_w = 1e-4 * params.omega_r_rated
    h_b = 1e-4 * params.pitch_max

    def diff(fun, x, h, lo, hi, name):
        if x - h >= lo and x + h <= hi:
            return (fun(x + h) - fun(x - h)) / (2 * h)
        log.info("linearize_at: one-sided difference in %s at %s", name, op_point)
        if x + h <= hi:
            return (fun(x + h) - fun(x)) / h
        return (fun(x) - fun(x - h)) / h

    a11 = diff(lambda w: _rotor_accel(w, beta, T_g, v, params, aero),
               omega, h_w, params.omega_floor, np.inf, "omega_r")
    a12 = diff(lambda b: _rotor_accel(omega, b, T_g, v, params, aero),
               beta, h_b, params.pitch_min, params.pitch_max, "beta")
    h_t = 1e-4 * params.T_g_rated
    b_tg = (_rotor_accel(omega, beta, T_g + h_t, v, params, aero)
            - _rotor_accel(omega, beta, T_g - h_t, v, params, aero)) / (2 * h_t)
    A = np.array([[a11, a12], [0.0, -1.0 / params.pitch_tau]])
    B_Tg = np.array([[b_tg], [0.0]])
    B_beta = np.array([[0.0], [1.0 / params.pitch_tau]])
    return A, B_Tg, B_beta


def augment_integral(A, B):
    """Append ``x_I`` with ``dx_I/dt = -dx_1`` (integral of ``omega_ref - omega_r``)."""
    n = A.shape[0]
    A_aug = np.zeros((n + 1, n + 1))
    A_aug[:n, :n] = A
    A_aug[n, 0] = -1.0
    B_aug = np.vstack([B, np.zeros((1, B.shape[1]))])
    return A_aug, B_aug


def is_stabilizable(A, B, tol: float = 1e-9) -> bool:
    n = A.shape[0]
    for lam in np.linalg.eigvals(A):
        if lam.real >= -tol:
            M = np.hstack([A - lam * np.eye(n), B])
            if np.linalg.matrix_rank(M, tol=tol * max(1.0, np.abs(M).max())) < n:
                return False
    return True


def _initial_gain(A, B):
    """Stabilizing gain by Bass's method (requires controllability)."""
    n = A.shape[0]
    alpha = np.linalg.norm(A, 2) + 1.0
    Abar = -(A + alpha * np.eye(n))
    Z = solve_continuous_lyapunov(Abar, -2.0 * B @ B.T)
    if np.linalg.cond(Z) > 1e14:
        raise SynthesisError("pair is not controllable; cannot seed the Riccati iteration")
    return B.T @ np.linalg.inv(Z)


def lqr(A, B, Q, R: float, tol: float = 1e-12, max_iter: int = 200):
    """Continuous-time LQR gain by Newton-Kleinman iteration.

    Returns ``(K, P)`` for the control law ``u = -K x``.
    """
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    Q = np.asarray(Q, float)
    if not is_stabilizable(A, B):
        raise SynthesisError("pair (A, B) is not stabilizable")
    # work with a unit-weight input to keep the iteration well scaled
    r_sqrt = np.sqrt(float(R))
    Bs = B / r_sqrt
    K = _initial_gain(A, Bs)
    for _ in range(max_iter):
        Acl = A - Bs @ K
        P = solve_continuous_lyapunov(Acl.T, -(Q + K.T @ K))
        K_new = Bs.T @ P
        if np.linalg.norm(K_new - K) <= tol * max(1.0, np.linalg.norm(K_new)):
            return K_new / r_sqrt, P
        K = K_new
    raise SynthesisError("Riccati iteration did not converge")


def synthesize_gains(vertex_models, Q, R: float, torque_region: bool = False,
                     labels=None) -> list[VertexGain]:
    """Integral-augmented LQR gains for each ``(A, B)`` vertex model.

    With ``torque_region`` the pitch state is excluded from the design, so the
    pitch component of ``k_x`` is a structural zero.
    """
    Q = np.asarray(Q, float)
    gains = []
    for idx, (A, B) in enumerate(vertex_models):
        name = labels[idx] if labels else f"vertex {idx}"
        A = np.asarray(A, float)
        B = np.asarray(B, float).reshape(-1, 1)
        if torque_region:
            A_red, B_red = A[:1, :1], B[:1]
            Q_red = Q[np.ix_([0, 2], [0, 2])]
        else:
            A_red, B_red, Q_red = A, B, Q
        A_aug, B_aug = augment_integral(A_red, B_red)
        try:
            K, _ = lqr(A_aug, B_aug, Q_red, R)
        except (SynthesisError, np.linalg.LinAlgError) as exc:
            raise SynthesisError(f"{name}: {exc}") from None
        K = K.ravel()
        eig = np.linalg.eigvals(A_aug - B_aug @ K.reshape(1, -1))
        if np.any(eig.real >= 0):
            raise SynthesisError(f"{name}: closed loop not Hurwitz, eigenvalues {eig}")
        if torque_region:
            k_x, k_I = (float(K[0]), 0.0), -float(K[1])
        else:
            k_x, k_I = (float(K[0]), float(K[1])), -float(K[2])
        gains.append(VertexGain(k_x, k_I))
    return gains


def closed_loop_matrix(A, B, gain: VertexGain, torque_region: bool = False):
    """``A_aug - B_aug K`` for a vertex, with ``u = -k_x . dx + k_I x_I``."""
    A = np.asarray(A, float)
    B = np.asarray(B, float).reshape(-1, 1)
    if torque_region:
        A_aug, B_aug = augment_integral(A[:1, :1], B[:1])
        K = np.array([[gain.k_x[0], -gain.k_I]])
    else:
        A_aug, B_aug = augment_integral(A, B)
        K = np.array([[gain.k_x[0], gain.k_x[1], -gain.k_I]])
    return A_aug - B_aug @ K
