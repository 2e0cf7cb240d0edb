import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fuzzyblend.control import (PdcController, Premise, TrackingState, baseline_torque_law,
                                compute_omega_ref, controller_from_dict, controller_to_dict,
                                filter_reference, full_load_control, kappa, partial_load_control)
from fuzzyblend.synthesis import VertexGain
from fuzzyblend.turbine import TurbineParams

small = st.floats(-10, 10, allow_nan=False)


def single(k_x, k_I, u_min=0.0, u_max=1e9):
    return PdcController([], [VertexGain(k_x, k_I)], u_min, u_max)


def test_omega_ref_examples(params):
    assert compute_omega_ref(9.0, TurbineParams(lambda_opt=7.0)) == pytest.approx(1.0)
    assert compute_omega_ref(params.v_rated, params) == params.omega_r_rated
    assert compute_omega_ref(1e-12, params) == pytest.approx(0.0, abs=1e-12)


def test_reference_filter():
    tr = TrackingState(omega_ref_f=0.0)
    dt, tau = 0.01, 2.0
    t, hit = 0.0, None
    for _ in range(2000):
        tr = filter_reference(tr, 1.0, dt, tau)
        t += dt
        if hit is None and tr.omega_ref_f >= 1 - math.exp(-1):
            hit = t
    assert abs(hit - tau) <= dt + 1e-9
    assert tr.omega_ref_f == pytest.approx(1.0, abs=1e-4)
    assert filter_reference(TrackingState(), 0.7, dt, tau=0.0).omega_ref_f == 0.7


def test_partial_load_examples():
    assert partial_load_control(single((2.0, 0.0), 3.0), (0.1, 0.7), 0.2, ()) == pytest.approx(0.4)
    assert partial_load_control(single((2.0, 0.0), 3.0), (0.0, 0.0), 0.0, ()) == 0.0
    two = PdcController([Premise("z", 0, 1)], [VertexGain((2.0, 0.0), 3.0)] * 2, 0.0, 1e9)
    for z in (-1.0, 0.3, 0.5, 2.0):
        assert partial_load_control(two, (0.1, 0.7), 0.2, (z,)) == pytest.approx(0.4)


def test_full_load_examples():
    ctrl = single((1.0, 0.5), 2.0, 0.0, math.radians(30))
    assert ctrl.raw_output((0.2, 0.1), 0.05, [1.0]) == pytest.approx(-0.15)
    assert full_load_control(ctrl, (0.2, 0.1), 0.05, ()) == 0.0
    assert full_load_control(ctrl, (0.0, 0.0), 0.0, ()) == 0.0
    premises = [Premise("a", 0, 1), Premise("b", 0, 1), Premise("c", 0, 1)]
    vertices = [VertexGain((float(i), 0.0), 0.0) for i in range(8)]
    big = PdcController(premises, vertices, -1e9, 1e9)
    assert big.raw_output((1.0, 0.0), 0.0, [0] * 7 + [1]) == -7.0


def test_vertex_count_checked():
    with pytest.raises(ValueError):
        PdcController([Premise("a", 0, 1)], [VertexGain((1.0, 0.0), 1.0)], 0, 1)


@given(small, small, small, small, st.floats(0, 1))
def test_torque_law_ignores_pitch(dx1, b1, b2, x_I, z):
    ctrl = PdcController([Premise("z", 0, 1)],
                         [VertexGain((2.0, 0.0), -3.0), VertexGain((5.0, 0.0), -1.0)], -1e9, 1e9)
    h = ctrl.memberships((z,))
    assert ctrl.raw_output((dx1, b1), x_I, h) == ctrl.raw_output((dx1, b2), x_I, h)


@given(small, small, small, st.floats(-5, 5))
def test_positive_homogeneity(dx1, dx2, x_I, alpha):
    ctrl = single((1.5, -0.25), 0.7)
    h = [1.0]
    assert ctrl.raw_output((alpha * dx1, alpha * dx2), alpha * x_I, h) == pytest.approx(
        alpha * ctrl.raw_output((dx1, dx2), x_I, h), rel=1e-12, abs=1e-12)


def test_designed_laws_respect_structure(controllers):
    assert len(controllers.partial.vertices) == 4
    assert len(controllers.full.vertices) == 8
    rng = np.random.default_rng(0)
    for _ in range(100):
        z = (rng.uniform(0, 2), rng.uniform(0, 0.6), rng.uniform(0, 30))
        h = controllers.full.memberships(z)
        assert abs(h.sum() - 1) < 1e-12 and h.min() >= 0


def test_baseline_torque_law(params):
    assert baseline_torque_law(0.0, params) == 0.0
    w = 60.0
    assert baseline_torque_law(2 * w, params) == pytest.approx(4 * baseline_torque_law(w, params))
    assert baseline_torque_law(1e4, params) == params.T_g_rated
    # at optimal tip speed the law balances the aerodynamic torque
    v = 7.0
    w_r = params.lambda_opt * v / params.R
    p_aero = 0.5 * params.rho * math.pi * params.R ** 2 * v ** 3 * params.cp_max
    assert kappa(params) * (params.n_g * w_r) ** 2 * params.n_g * w_r == pytest.approx(p_aero)


def test_controller_dict_round_trip(controllers):
    back = controller_from_dict(controller_to_dict(controllers.full))
    assert np.array_equal(back.kx_table, controllers.full.kx_table)
    assert np.array_equal(back.ki_table, controllers.full.ki_table)
    assert back.premises == controllers.full.premises
    with pytest.raises(ValueError):
        controller_from_dict({"premises": []})
