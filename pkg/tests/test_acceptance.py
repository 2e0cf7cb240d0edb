"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from fuzzyblend.aero import BETZ_LIMIT
from fuzzyblend.blending import (CouplingFilter, apply_coupling, coupling_memberships,
                                 filter_diagonal, multi_region_control)
from fuzzyblend.config import BlendingConfig, ScenarioConfig
from fuzzyblend.control import full_load_control, partial_load_control
from fuzzyblend.fuzzy import convex_combine, corner_index
from fuzzyblend.sim import run_scenario
from fuzzyblend.synthesis import closed_loop_matrix, linearize_at
from fuzzyblend.timeseries import compute_metrics, write_csv
from fuzzyblend.turbine import TurbineState, step
from fuzzyblend.wind import Constant, Turbulent

# turbulent trace for the bumplessness check; seed 1 is the first seed whose
# blended and hard-switch runs both cross rated speed at least twice
BUMPLESS_WIND = Turbulent(mean=11.0, intensity=0.08, seed=1)


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def samples(params):
    rng = np.random.default_rng(2024)
    omega = rng.uniform(0.0, 2.0 * params.omega_r_rated, 100_000)
    torque = rng.uniform(0.0, 1.5 * params.T_g_rated, 100_000)
    return omega, torque


def test_1_convex_sum(params, samples):
    filt = CouplingFilter.from_params(params)
    t0 = time.perf_counter()
    H = np.array([coupling_memberships(filt, w, T) for w, T in zip(*samples)])
    elapsed = time.perf_counter() - t0
    err = np.max(np.abs(H.sum(axis=1) - 1.0))
    ok = err <= 1e-12 and H.min() >= 0.0 and elapsed < 1.0
    report(1, "convex-sum identities", ok,
           f"max|sum-1|={err:.1e}, min h={H.min():.1e}, {elapsed:.2f} s for 1e5 samples")


def test_2_filter_reconstruction(params, samples):
    worst = 0.0
    for mode in ("gated_sector", "ramp", "exact"):
        filt = CouplingFilter.from_params(params, torque_weighting=mode)
        vertices = filt.vertices
        for w, T in zip(*samples):
            F = convex_combine(coupling_memberships(filt, w, T), vertices)
            f1, f2 = filter_diagonal(filt, w, T)
            worst = max(worst, abs(F[0, 0] - f1), abs(F[1, 1] - f2), abs(F[0, 1]), abs(F[1, 0]))
    report(2, "filter reconstruction", worst <= 1e-12, f"max elementwise error {worst:.1e}")


def test_3_exact_sector(params):
    filt = CouplingFilter.from_params(params, torque_weighting="exact")
    torques = np.linspace(params.T_g_min, params.T_g_rated, 1000)
    rel = max(abs(apply_coupling(filt, 0.0, T, params.omega_r_rated)[1] / params.T_g_rated - 1)
              for T in torques)
    report(3, "exact-sector identity", rel <= 1e-9, f"max relative deviation from T_max {rel:.1e}")


def test_4_triple_sum(params, controllers):
    cb, cc = controllers.partial, controllers.full
    rng = np.random.default_rng(7)
    worst_T = worst_b = 0.0
    t0 = time.perf_counter()
    filt = CouplingFilter.from_params(params)
    for _ in range(10_000):
        w = rng.uniform(0.5, 1.5) * params.omega_r_rated
        dx = (rng.uniform(-0.3, 0.3), rng.uniform(0.0, 0.5))
        x_I = (rng.uniform(-4.0, 1.0), rng.uniform(-1.0, 1.0))
        T_prev = rng.uniform(0.0, 1.2) * params.T_g_rated
        v_hat = rng.uniform(3.0, 25.0)
        T_t, b_t = multi_region_control(filt, cb, cc, dx, x_I, w, T_prev, dx[1], v_hat)
        u1 = partial_load_control(cb, dx, x_I[0], (w, v_hat))
        u2 = full_load_control(cc, dx, x_I[1], (w, dx[1], v_hat))
        b_f, T_f = apply_coupling(filt, u2, u1, w, T_premise=T_prev)
        worst_T = max(worst_T, abs(T_t - T_f) / params.T_g_rated)
        worst_b = max(worst_b, abs(b_t - b_f))
    elapsed = time.perf_counter() - t0
    ok = worst_T <= 1e-12 and worst_b <= 1e-12 and elapsed < 5.0
    report(4, "triple-sum/factored equivalence", ok,
           f"torque {worst_T:.1e} (p.u.), pitch {worst_b:.1e} rad, {elapsed:.2f} s for 1e4 points")


@pytest.fixture(scope="module")
def bumpless_runs(params, aero, controllers):
    t0 = time.perf_counter()
    base = ScenarioConfig(wind=BUMPLESS_WIND, duration=60.0)
    runs = {
        "blended": run_scenario(base, controllers, aero),
        "hard_switch": run_scenario(replace(base, controller="hard_switch"), controllers, aero),
        # same region laws with the filter held at F3 = I: no transition scheduling
        "reference": run_scenario(replace(base, blending=BlendingConfig(pinned_vertex=3)),
                                  controllers, aero),
    }
    return runs, time.perf_counter() - t0


def test_5_bumplessness(params, bumpless_runs):
    runs, elapsed = bumpless_runs
    m = {k: compute_metrics(v, params) for k, v in runs.items()}
    ratio = m["blended"].max_step_jump_Tg / m["hard_switch"].max_step_jump_Tg
    tower = m["blended"].tower_std / m["reference"].tower_std
    crossings = (m["blended"].transition_count, m["hard_switch"].transition_count)
    ok = (min(crossings) >= 2 and ratio <= 0.2 and abs(tower - 1) <= 0.10 and elapsed < 30.0)
    report(5, "bumplessness", ok,
           f"crossings {crossings}, jump {m['blended'].max_step_jump_Tg:.0f} vs "
           f"{m['hard_switch'].max_step_jump_Tg:.0f} N m (ratio {ratio:.3f}), "
           f"tower std ratio {tower:.3f}, {elapsed:.1f} s")


def test_6_partial_load(params, aero, controllers):
    log = run_scenario(ScenarioConfig(wind=Constant(8.0), duration=200.0), controllers, aero)
    v = 8.0
    lam = log["omega_r"][-1] * params.R / v
    p_w = 0.5 * params.rho * params.area * v ** 3
    cp = log["P_g"][-1] * params.P_rated / p_w
    lam_err = abs(lam / params.lambda_opt - 1)
    ok = lam_err <= 0.02 and 0.9 * params.cp_max <= cp < BETZ_LIMIT
    report(6, "partial-load optimization", ok,
           f"lambda error {lam_err:.2e}, cP {cp:.4f} (floor {0.9 * params.cp_max:.4f})")


def test_7_full_load(params, aero, controllers):
    log = run_scenario(ScenarioConfig(wind=Constant(16.0), duration=200.0), controllers, aero)
    e_w = abs(log["omega_r"][-1] / params.omega_r_rated - 1)
    e_p = abs(log["P_g"][-1] - 1)
    e_t = abs(log["T_g_tilde"][-1] / params.T_g_rated - 1)
    ok = max(e_w, e_p, e_t) <= 0.01
    report(7, "full-load regulation", ok,
           f"omega {e_w:.1e}, power {e_p:.1e}, torque {e_t:.1e} (relative)")


def test_8_observer(params, aero, controllers, bumpless_runs):
    worst = 0.0
    for v in (6.0, 9.0, 16.0):
        log = run_scenario(ScenarioConfig(wind=Constant(v), duration=30.0), controllers, aero)
        after = log["t"] >= 20.0
        worst = max(worst, np.max(np.abs(log["v_hat"][after] - v)) / v)
    turb = bumpless_runs[0]["blended"]
    rms = np.sqrt(np.mean((turb["v_hat"] - turb["v"]) ** 2)) / BUMPLESS_WIND.mean
    ok = worst <= 0.02 and rms <= 0.08
    report(8, "observer accuracy", ok, f"constant-wind error {worst:.1e}, turbulent RMS {rms:.3f}")


def _endpoint(dt, params, aero):
    # smooth: constant inputs, pitch rate below its limit, no clamps active
    s = TurbineState(1.0, np.radians(2.0), 0.1, 0.0)
    for _ in range(int(round(10.0 / dt))):
        s = step(s, (25_000.0, np.radians(3.0)), 10.0, dt, params, aero)
    return np.array([s.omega_r, s.beta, s.x_T, s.x_T_dot])


def test_9_numerics(tmp_path, params, aero, controllers):
    y = [_endpoint(dt, params, aero) for dt in (0.04, 0.02, 0.01)]
    d1, d2 = np.abs(y[0] - y[1]), np.abs(y[1] - y[2])
    # components already converged to round-off carry no order information
    mask = d2 > 1e-13 * np.abs(y[2]).max()
    order = float(np.min(np.log2(d1[mask] / d2[mask])))

    hurwitz = True
    for ctrl, torque in ((controllers.partial, True), (controllers.full, False)):
        for corner, gain in zip(corner_index(len(ctrl.premises)), ctrl.vertices):
            z = [p.hi if c else p.lo for p, c in zip(ctrl.premises, corner)]
            op = (z[0], params.pitch_min, z[1]) if torque else tuple(z)
            A, B_tg, B_beta = linearize_at(op, params, aero)
            eig = np.linalg.eigvals(closed_loop_matrix(A, B_tg if torque else B_beta, gain, torque))
            hurwitz &= bool(np.all(eig.real < 0))

    cfg = ScenarioConfig(wind=Turbulent(11.0, 0.08, 5), duration=10.0)
    for name in ("a.csv", "b.csv"):
        write_csv(run_scenario(cfg, controllers, aero), tmp_path / name)
    identical = (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    ok = order >= 3.5 and hurwitz and identical
    report(9, "numerics", ok,
           f"RK4 order {order:.2f}, all 12 vertex loops Hurwitz: {hurwitz}, identical reruns: {identical}")
