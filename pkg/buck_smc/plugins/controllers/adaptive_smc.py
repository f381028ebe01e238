"""
adaptive_smc
############

Adaptive sliding mode controller with neural network estimate of the
nonlinear term::

    f(x)  = v_o/(L*C) + dv_o/dt/(R*C)
    f_hat = W_hat . sigma(x) + offset
    D     = clamp((L*C / V_in) * [c*x2 + f_hat + eta*sw(s)], 0, 1)
    dW_hat/dt = gamma * s * sigma(x)

where ``sigma(x)`` is the last hidden layer of the frozen, offline trained
network evaluated on ``(e, e_dot) = (x1, x2)``. With exact estimate
``f_hat = f`` the law equals classic ``u_eq + u_sw``. Adaptation is frozen
while duty is saturated.

Composite Lyapunov value::

    V = s^2/2 + (W_hat - W*) . (W_hat - W*) / (2*gamma)

is available when oracle weights ``W*`` are known, e.g. in the synthetic
closed loop of ``representable_closed_loop``.

adaptive_smc sample usage
=========================

Build controller from trained model::

    from buck_smc.plugins.neural.mlp import load_model
    from buck_smc.plugins.controllers.adaptive_smc import DnnSmc

    controller = DnnSmc(ConverterParams(), load_model("model.json"), SmcConfig(500.0))

adaptive_smc reference
======================

.. autoclass:: buck_smc.plugins.controllers.adaptive_smc.AdaptiveSmcState
.. autofunction:: buck_smc.plugins.controllers.adaptive_smc.dnn_smc_update
.. autofunction:: buck_smc.plugins.controllers.adaptive_smc.dnn_smc_duty
.. autofunction:: buck_smc.plugins.controllers.adaptive_smc.true_f
.. autofunction:: buck_smc.plugins.controllers.adaptive_smc.composite_lyapunov
.. autofunction:: buck_smc.plugins.controllers.adaptive_smc.representable_closed_loop
.. autoclass:: buck_smc.plugins.controllers.adaptive_smc.DnnSmc
"""
import logging
import math
import dataclasses

from typing import List, Tuple

import numpy as np

from ..models.plant import (
    ConverterParams,
    ErrorState,
    PlantState,
    error_coordinates,
    integrate_step,
)
from ..neural.adaptive_head import AdaptiveHead, adapt, f_hat, head_from_mlp
from ..neural.mlp import Mlp, hidden_features, standardize_inputs
from .base import Controller, ControlOutput, clamp
from .smc import SmcConfig, lyapunov_value, sliding_surface, switching_function

log = logging.getLogger(__name__)


@dataclasses.dataclass
class AdaptiveSmcState:
    """
    Mutable state of adaptive controller, single owner.

    :param head: (AdaptiveHead) adapted output weights
    :param smc: (SmcConfig) sliding mode gains
    :param net: (Mlp) frozen trained network
    :param freeze_adaptation: (bool) keep ``W_hat`` constant if True
    :param w_star: (array) optional oracle weights for composite Lyapunov value
    """

    head: AdaptiveHead
    smc: SmcConfig
    net: Mlp
    freeze_adaptation: bool = False
    w_star: np.ndarray = None
    last_s: float = 0.0
    lyapunov_history: List[Tuple[float, float]] = dataclasses.field(default_factory=list)

    def __post_init__(self):
        if len(self.head) != self.net.hidden_width:
            raise ValueError(
                "buck-smc:AdaptiveSmcState head length {} does not match network "
                "last hidden width {}".format(len(self.head), self.net.hidden_width)
            )
        if self.w_star is not None:
            self.w_star = np.asarray(self.w_star, dtype=float).ravel()


def true_f(state: PlantState, params: ConverterParams) -> float:
    """
    Return ``v_o/(L*C) + dv_o/dt/(R*C)`` with ``dv_o/dt = (i_L - v_o/R)/C``.
    """
    i_l, v_o = state
    v_dot = (i_l - v_o / params.load_resistance_ohm) / params.capacitance_farad
    return v_o / params.lc + v_dot / params.rc


def composite_lyapunov(s: float, W_tilde, gamma: float) -> float:
    """Return ``s^2/2 + W_tilde . W_tilde / (2*gamma)``."""
    if not gamma > 0:
        raise ValueError(
            "buck-smc:composite_lyapunov gamma must be positive, got '{}'".format(gamma)
        )
    w = np.asarray(W_tilde, dtype=float).ravel()
    return 0.5 * s * s + float(w @ w) / (2.0 * gamma)


def features(net: Mlp, err: ErrorState) -> np.ndarray:
    """Feature vector sigma(x) for physical error state."""
    return hidden_features(net, standardize_inputs(net, (err[0], err[1])))


def _lyapunov(state: AdaptiveSmcState, s: float) -> float:
    if state.w_star is not None and state.head.gain_gamma > 0:
        return composite_lyapunov(
            s, state.head.weights_W_hat - state.w_star, state.head.gain_gamma
        )
    return lyapunov_value(s)


def dnn_smc_update(
    err: ErrorState,
    state: AdaptiveSmcState,
    params: ConverterParams,
    dt_s: float,
    time_s: float = None,
) -> ControlOutput:
    """
    Compute duty and diagnostics, then adapt ``W_hat`` unless duty saturated.

    :param err: (ErrorState) measured tracking error
    :param state: (AdaptiveSmcState) controller state, updated in place
    :param params: (ConverterParams) nominal converter parameters
    :param dt_s: (float) time until next update
    :param time_s: (float) current time, appends Lyapunov history if given
    """
    if not dt_s > 0:
        raise ValueError("buck-smc:dnn_smc dt_s must be positive, got '{}'".format(dt_s))
    cfg = state.smc
    s = sliding_surface(err, cfg)
    sigma = features(state.net, err)
    estimate = f_hat(state.head, sigma)
    raw = (params.lc / params.input_voltage_volt) * (
        cfg.surface_slope_c * err[1]
        + estimate
        + cfg.switching_gain_eta * switching_function(s, cfg.boundary_layer_phi)
    )
    if not (math.isfinite(raw) and math.isfinite(s)):
        raise RuntimeError(
            "buck-smc:dnn_smc non-finite control, s={}, f_hat={}".format(s, estimate)
        )
    duty = clamp(raw, 0.0, 1.0)
    saturated = duty != raw
    value = _lyapunov(state, s)
    if time_s is not None:
        state.lyapunov_history.append((time_s, value))
    if not (saturated or state.freeze_adaptation):
        adapt(state.head, s, sigma, dt_s)
    state.last_s = s
    return ControlOutput(duty, s, value, estimate, saturated)


def dnn_smc_duty(
    err: ErrorState, state: AdaptiveSmcState, params: ConverterParams, dt_s: float
) -> float:
    """Return duty of ``dnn_smc_update``, adapting state in place."""
    return dnn_smc_update(err, state, params, dt_s).duty


def check_switching_gain(cfg: SmcConfig, approx_error_bound: float) -> bool:
    """Log warning if ``eta <= eps_N + T``, return True if bound holds."""
    bound = approx_error_bound + cfg.disturbance_bound_T
    if cfg.switching_gain_eta <= bound:
        log.warning(
            "buck-smc:adaptive_smc switching gain eta {} does not exceed "
            "eps_N + T = {}".format(cfg.switching_gain_eta, bound)
        )
        return False
    return True


class DnnSmc(Controller):
    """
    Adaptive neural sliding mode controller.

    :param params: (ConverterParams) nominal converter parameters
    :param net: (Mlp) trained network, not modified
    :param cfg: (SmcConfig) sliding mode gains
    :param gain_gamma: (float) adaptation gain
    :param approx_error_bound: (float) network approximation error bound
    :param w_max_ratio: (float) weights projection radius relative to trained norm
    :param freeze_adaptation: (bool) keep output weights constant
    :param cold_start: (bool) start adaptation from zero output weights
    :param w_star: (array) optional oracle weights for composite Lyapunov value
    """

    name = "dnn_smc"

    def __init__(
        self,
        params: ConverterParams,
        net: Mlp,
        cfg: SmcConfig = None,
        gain_gamma: float = 1e3,
        approx_error_bound: float = 0.0,
        w_max_ratio: float = 10.0,
        freeze_adaptation: bool = False,
        cold_start: bool = False,
        w_star=None,
    ) -> None:
        super().__init__(params)
        cfg = cfg or SmcConfig()
        check_switching_gain(cfg, approx_error_bound)
        head = head_from_mlp(
            net,
            gain_gamma=gain_gamma,
            approx_error_bound=approx_error_bound,
            w_max_ratio=w_max_ratio,
            cold_start=cold_start,
        )
        self.state = AdaptiveSmcState(
            head=head,
            smc=cfg,
            net=net.copy(),
            freeze_adaptation=freeze_adaptation,
            w_star=w_star,
        )

    @property
    def cfg(self) -> SmcConfig:
        return self.state.smc

    def update(
        self, time_s: float, state: PlantState, plant_params: ConverterParams, dt_s: float
    ) -> ControlOutput:
        out = dnn_smc_update(
            error_coordinates(state, plant_params), self.state, self.params, dt_s, time_s
        )
        self._count(out.saturated)
        return out


def representable_closed_loop(
    net: Mlp,
    w_star,
    w_hat0,
    smc: SmcConfig,
    gamma: float,
    x0: Tuple[float, float],
    duration_s: float,
    dt_s: float,
    control_gain: float = 1.0,
    disturbance=None,
) -> List[Tuple[float, float, float]]:
    """
    Simulate synthetic second order plant whose nonlinear term is exactly
    representable by network features::

        dx1/dt = x2
        dx2/dt = W* . sigma(x) - b * u + d(t)

    under the adaptive law with ``f_hat = W_hat . sigma(x)`` and unsaturated
    control ``u = (c*x2 + f_hat + eta*sw(s)) / b``.

    :param net: (Mlp) feature network, inputs taken as physical ``(x1, x2)``
    :param w_star: (array) true output weights
    :param w_hat0: (array) initial estimate
    :param smc: (SmcConfig) sliding mode gains
    :param gamma: (float) adaptation gain, positive
    :param x0: (tuple) initial ``(x1, x2)``
    :param duration_s: (float) simulated time
    :param dt_s: (float) integration and controller step
    :param control_gain: (float) input gain ``b``
    :param disturbance: (Disturbance) optional additive disturbance
    :return: list of ``(t, s, V)`` tuples, one per controller step, ``V`` being
        composite Lyapunov value
    """
    if not control_gain > 0:
        raise ValueError(
            "buck-smc:representable_closed_loop control_gain must be positive"
        )
    w_star = np.asarray(w_star, dtype=float).ravel()
    head = AdaptiveHead(w_hat0, gain_gamma=gamma)
    state = AdaptiveSmcState(head=head, smc=smc, net=net, w_star=w_star)
    x = ErrorState(*x0)
    history = []
    steps = int(round(duration_s / dt_s))
    for k in range(steps + 1):
        t = k * dt_s
        s = sliding_surface(x, smc)
        sigma = features(net, x)
        history.append((t, s, _lyapunov(state, s)))
        if k == steps:
            break
        u = (
            smc.surface_slope_c * x[1]
            + f_hat(head, sigma)
            + smc.switching_gain_eta * switching_function(s, smc.boundary_layer_phi)
        ) / control_gain
        d = disturbance.value(t) if disturbance is not None else 0.0

        def derivative(e, u=u, d=d):
            return ErrorState(
                e[1], float(w_star @ features(net, e)) - control_gain * u + d
            )

        x = integrate_step(x, derivative, dt_s)
        adapt(head, s, sigma, dt_s)
    return history
