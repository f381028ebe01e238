import sys
import math
import logging
import pytest
import numpy as np

sys.path.insert(0, "..")

from buck_smc.plugins.models.plant import (
    ConverterParams,
    Disturbance,
    ErrorState,
    PlantState,
)
from buck_smc.plugins.controllers.smc import SmcConfig, ClassicSmc
from buck_smc.plugins.controllers.adaptive_smc import (
    AdaptiveSmcState,
    DnnSmc,
    true_f,
    composite_lyapunov,
    check_switching_gain,
    dnn_smc_update,
    representable_closed_loop,
)
from buck_smc.plugins.neural.adaptive_head import AdaptiveHead, adapt, f_hat
from buck_smc.plugins.neural.mlp import Mlp, init_mlp
from buck_smc.plugins.runners.ScenarioRunner import Scenario, run_scenario

logging.basicConfig(level=logging.ERROR)

params = ConverterParams()


def exact_net():
    """ReLU network reproducing f(e, e_dot) for nominal parameters."""
    lc, rc = params.lc, params.rc
    return Mlp(
        layer_sizes=[2, 3, 3, 1],
        weights=[
            [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]],
            np.eye(3),
            [[-1.0 / lc, -1e4 / rc, 0.0]],
        ],
        biases=[
            [10.0, 10.0, 1.0],
            [0.0, 0.0, 0.0],
            [params.reference_voltage_volt / lc + 10.0 / lc + 1e5 / rc],
        ],
        activation="relu",
        input_std=[1.0, 1e4],
    )


def test_true_f():
    assert true_f(PlantState(0.5, 5.0), params) == pytest.approx(5.0 / params.lc)
    assert true_f(PlantState(0.0, 0.0), params) == 0.0
    # dv_o/dt = 1000 V/s
    state = PlantState(0.2, 0.0)
    assert true_f(state, params) == pytest.approx(1000.0 / params.rc)


# test_true_f()


def test_composite_lyapunov():
    assert composite_lyapunov(0.0, [0.0, 0.0], 1.0) == 0.0
    assert composite_lyapunov(2.0, [0.0], 5.0) == 2.0
    assert composite_lyapunov(0.0, [1.0, 1.0], 2.0) == 0.5
    assert composite_lyapunov(1.0, [3.0, 4.0], 25.0) == pytest.approx(1.0)
    with pytest.raises(ValueError, match="gamma"):
        composite_lyapunov(1.0, [1.0], 0.0)
    with pytest.raises(ValueError, match="gamma"):
        composite_lyapunov(1.0, [1.0], -1.0)


# test_composite_lyapunov()


def test_adaptive_state_length_mismatch():
    net = init_mlp()
    with pytest.raises(ValueError, match="does not match"):
        AdaptiveSmcState(head=AdaptiveHead([1.0, 2.0]), smc=SmcConfig(), net=net)


# test_adaptive_state_length_mismatch()


def test_exact_network_estimate():
    net = exact_net()
    controller = DnnSmc(params, net, freeze_adaptation=True)
    for state in (PlantState(0.5, 5.0), PlantState(1.3, 2.0), PlantState(0.0, 0.0)):
        out = controller.update(0.0, state, params, 1e-6)
        assert out.f_hat == pytest.approx(true_f(state, params), rel=1e-9, abs=1e-3)


# test_exact_network_estimate()


def test_exact_network_reduces_to_classic_smc():
    eta = 3e7
    smc = SmcConfig(
        surface_slope_c=500.0, switching_gain_eta=eta, boundary_layer_phi=2 * eta * 1e-6
    )
    scn = Scenario(duration_s=0.01)
    classic = run_scenario(scn, ClassicSmc(params, smc))
    adaptive = run_scenario(scn, DnnSmc(params, exact_net(), smc, freeze_adaptation=True))
    assert np.max(np.abs(classic.duty - adaptive.duty)) < 1e-9
    assert np.max(np.abs(classic.v_o - adaptive.v_o)) < 1e-9


# test_exact_network_reduces_to_classic_smc()


def test_representable_closed_loop_lyapunov_decreases():
    net = init_mlp(activation="tanh", seed=0)
    w_star = np.array([2.0, -1.0, 1.5])
    smc = SmcConfig(surface_slope_c=50.0, switching_gain_eta=1e3, boundary_layer_phi=5.0)
    history = representable_closed_loop(
        net,
        w_star,
        w_star + np.array([0.5, -0.5, 0.5]),
        smc,
        gamma=50.0,
        x0=(0.2, 0.0),
        duration_s=0.01,
        dt_s=1e-6,
    )
    assert len(history) == 10001
    values = np.array([v for _, _, v in history])
    assert values[0] == pytest.approx(0.5 * 10.0 ** 2 + 0.75 / 100.0)
    assert np.all(values[1:] <= values[:-1] * (1.0 + 1e-6))
    assert abs(history[-1][1]) < smc.boundary_layer_phi
    with pytest.raises(ValueError, match="control_gain"):
        representable_closed_loop(
            net, w_star, w_star, smc, 50.0, (0.2, 0.0), 0.001, 1e-6, control_gain=0.0
        )


# test_representable_closed_loop_lyapunov_decreases()


def test_adaptation_frozen_while_saturated():
    net = init_mlp(activation="tanh", seed=2)
    controller = DnnSmc(params, net, SmcConfig(surface_slope_c=1000.0))
    initial = controller.state.head.weights_W_hat.copy()
    # output rising at 1e4 V/s from 0 V, duty clamps to 0
    out = controller.update(0.0, PlantState(2.0, 0.0), params, 1e-6)
    assert out.saturated is True
    assert out.duty == 0.0
    assert controller.state.head.weights_W_hat.tolist() == initial.tolist()
    # near equilibrium, unsaturated, s is not zero
    out = controller.update(1e-6, PlantState(0.5, 4.99), params, 1e-6)
    assert out.saturated is False
    assert out.s != 0.0
    assert controller.state.head.weights_W_hat.tolist() != initial.tolist()
    assert controller.saturation_count == 1
    assert controller.update_count == 2


# test_adaptation_frozen_while_saturated()


def test_dnn_smc_leaves_network_untouched():
    net = init_mlp(activation="tanh", seed=2)
    weights = [w.copy() for w in net.weights]
    controller = DnnSmc(params, net)
    run_scenario(Scenario(duration_s=0.002), controller)
    assert all(np.array_equal(a, b) for a, b in zip(weights, net.weights))
    # runner deep copies the controller
    assert controller.update_count == 0


# test_dnn_smc_leaves_network_untouched()


def test_dnn_smc_update_errors():
    net = init_mlp(activation="tanh", seed=2)
    state = AdaptiveSmcState(head=AdaptiveHead([0.0, 0.0, 0.0]), smc=SmcConfig(), net=net)
    with pytest.raises(ValueError, match="dt_s"):
        dnn_smc_update(ErrorState(0.0, 0.0), state, params, 0.0)
    state.head.offset = math.inf
    with pytest.raises(RuntimeError, match="non-finite"):
        dnn_smc_update(ErrorState(0.0, 0.0), state, params, 1e-6)


# test_dnn_smc_update_errors()


def test_lyapunov_history_with_oracle_weights():
    net = init_mlp(activation="tanh", seed=2)
    head = AdaptiveHead([1.0, 1.0, 1.0], gain_gamma=2.0)
    state = AdaptiveSmcState(
        head=head, smc=SmcConfig(), net=net, freeze_adaptation=True, w_star=[0.0, 0.0, 1.0]
    )
    out = dnn_smc_update(ErrorState(0.0, 0.0), state, params, 1e-6, time_s=0.5)
    assert out.s == 0.0
    assert out.lyapunov == pytest.approx(0.5)
    assert state.lyapunov_history == [(0.5, out.lyapunov)]


# test_lyapunov_history_with_oracle_weights()


def test_check_switching_gain(caplog):
    assert check_switching_gain(SmcConfig(switching_gain_eta=10.0), 1.0) is True
    with caplog.at_level(logging.WARNING):
        assert (
            check_switching_gain(
                SmcConfig(switching_gain_eta=10.0, disturbance_bound_T=6.0), 5.0
            )
            is False
        )
    assert "does not exceed" in caplog.text


# test_check_switching_gain()


def test_cold_start():
    net = init_mlp(activation="tanh", seed=2)
    warm = DnnSmc(params, net)
    cold = DnnSmc(params, net, cold_start=True)
    assert not cold.state.head.weights_W_hat.any()
    assert cold.state.head.offset == warm.state.head.offset
    assert cold.state.head.w_max == warm.state.head.w_max
    assert cold.name == "dnn_smc"


# test_cold_start()


def test_reaching_condition_with_additive_disturbance():
    smc = SmcConfig()
    assert check_switching_gain(smc.replace(disturbance_bound_T=1e7), 0.0) is True
    band = 2 * smc.switching_gain_eta * params.switching_period_s
    disturbances = (
        Disturbance("additive_step", magnitude=1e7, start_time_s=0.002, bound_T=1e7),
        Disturbance("additive_sine", magnitude=1e7, bound_T=1e7, frequency_hz=500.0),
    )
    controllers = (ClassicSmc(params, smc), DnnSmc(params, exact_net(), smc))
    for disturbance in disturbances:
        scn = Scenario(duration_s=0.01, additive_disturbance=disturbance)
        for controller in controllers:
            trace = run_scenario(scn, controller)
            s, duty = trace.s, trace.duty
            s0, ds = s[:-1], np.diff(s)
            checked = (duty[:-1] > 0.0) & (duty[:-1] < 1.0) & (np.abs(s0) >= band)
            violations = checked & (s0 * ds > 1e-6 * s0 ** 2)
            assert not violations.any(), (disturbance.kind, controller.name)
            assert np.all(np.isfinite(trace.v_o))


# test_reaching_condition_with_additive_disturbance()


def test_representable_closed_loop_descent_under_disturbance():
    net = init_mlp(activation="tanh", seed=0)
    w_star = np.array([2.0, -1.0, 1.5])
    smc = SmcConfig(surface_slope_c=50.0, switching_gain_eta=1e3, boundary_layer_phi=5.0)
    for disturbance in (
        Disturbance("additive_step", magnitude=300.0, bound_T=300.0),
        Disturbance("additive_sine", magnitude=300.0, bound_T=300.0, frequency_hz=500.0),
    ):
        history = representable_closed_loop(
            net,
            w_star,
            w_star + np.array([0.5, -0.5, 0.5]),
            smc,
            gamma=50.0,
            x0=(0.2, 0.0),
            duration_s=0.01,
            dt_s=1e-6,
            disturbance=disturbance,
        )
        s = np.array([item[1] for item in history])
        values = np.array([item[2] for item in history])
        # eta exceeds bound_T, V decreases outside the boundary layer
        outside = np.abs(s[:-1]) >= smc.boundary_layer_phi
        assert outside.sum() > 100
        assert np.all(values[1:][outside] <= values[:-1][outside])
        assert abs(s[-1]) < smc.boundary_layer_phi


# test_representable_closed_loop_descent_under_disturbance()


def test_adaptation_step_reduces_s_times_estimate_error():
    w_star = np.array([1.0, 1.0, 1.0])
    sigma = np.array([1.0, 0.5, 2.0])
    gamma, dt = 2.0, 0.01
    for s in (3.0, -3.0):
        head = AdaptiveHead([0.0, 0.0, 0.0], gain_gamma=gamma)
        before = s * float((w_star - head.weights_W_hat) @ sigma)
        adapt(head, s, sigma, dt)
        after = s * float((w_star - head.weights_W_hat) @ sigma)
        assert after < before
        assert after == pytest.approx(before - gamma * s ** 2 * float(sigma @ sigma) * dt)
        assert f_hat(head, sigma) == pytest.approx(gamma * s * dt * float(sigma @ sigma))
    head = AdaptiveHead([0.5, 0.5, 0.5], gain_gamma=gamma)
    adapt(head, 0.0, sigma, dt)
    assert head.weights_W_hat.tolist() == [0.5, 0.5, 0.5]


# test_adaptation_step_reduces_s_times_estimate_error()
