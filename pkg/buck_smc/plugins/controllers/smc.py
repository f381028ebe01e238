"""
smc
###

Classic sliding mode controller for the buck converter.

Sliding surface and control law::

    s    = c * x1 + x2
    u_eq = (L*C / V_in) * [c*x2 - x1/(L*C) - x2/(R*C) + V_ref/(L*C)]
    u_sw = (L*C / V_in) * eta * sw(s)
    D    = clamp(u_eq + u_sw, 0, 1)

where ``sw(s)`` is ``sgn(s)`` with ``sgn(0) = 0``, or the saturation
``clamp(s / phi, -1, 1)`` when boundary layer ``phi`` is positive. With this
sign the nominal closed loop gives ``ds/dt = -eta * sw(s)``, i.e.
``V = s^2 / 2`` decays with ``dV/dt = -eta * |s|``.

smc sample usage
================

Compute duty for a given error state::

    from buck_smc.plugins.models.plant import ConverterParams, ErrorState
    from buck_smc.plugins.controllers.smc import SmcConfig, smc_duty

    duty = smc_duty(ErrorState(0.2, -50.0), ConverterParams(), SmcConfig())

Use the stateful controller inside the scenario runner::

    from buck_smc.plugins.controllers.smc import ClassicSmc

    controller = ClassicSmc(ConverterParams(), SmcConfig(surface_slope_c=500))

smc reference
=============

.. autoclass:: buck_smc.plugins.controllers.smc.SmcConfig
.. autofunction:: buck_smc.plugins.controllers.smc.sliding_surface
.. autofunction:: buck_smc.plugins.controllers.smc.equivalent_control
.. autofunction:: buck_smc.plugins.controllers.smc.switching_control
.. autofunction:: buck_smc.plugins.controllers.smc.smc_duty
.. autofunction:: buck_smc.plugins.controllers.smc.lyapunov_value
.. autoclass:: buck_smc.plugins.controllers.smc.ClassicSmc
"""
import logging
import math
import dataclasses

from ..models.plant import ConverterParams, ErrorState, PlantState, error_coordinates
from .base import Controller, ControlOutput, clamp

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class SmcConfig:
    """
    Sliding mode controller gains.

    :param surface_slope_c: (float) sliding surface slope c, 1/s
    :param switching_gain_eta: (float) switching gain eta, V/s^2
    :param boundary_layer_phi: (float) boundary layer width, 0 means pure sign
    :param disturbance_bound_T: (float) assumed upper bound T of |d(t)|

    Default eta of 3e7 V/s^2 covers the model mismatch of a 12 to 13 V input
    step, about 1.3e7 V/s^2. With pure sign switching at a 1 us controller
    step s chatters within about eta * dt, which biases v_o by about
    ``eta * dt / (2 * c)``, some 0.02-0.03 V at c = 500. Set
    ``boundary_layer_phi`` or lower eta when that bias matters more than
    robustness to input steps.
    """

    surface_slope_c: float = 500.0
    switching_gain_eta: float = 3e7
    boundary_layer_phi: float = 0.0
    disturbance_bound_T: float = 0.0

    def __post_init__(self):
        if not self.surface_slope_c > 0:
            raise ValueError(
                "buck-smc:SmcConfig 'surface_slope_c' must be positive, got '{}'".format(
                    self.surface_slope_c
                )
            )
        for name in ("switching_gain_eta", "boundary_layer_phi", "disturbance_bound_T"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(
                    "buck-smc:SmcConfig '{}' must be finite and nonnegative, got '{}'".format(
                        name, value
                    )
                )

    def replace(self, **kwargs) -> "SmcConfig":
        return dataclasses.replace(self, **kwargs)


def sign(value: float) -> float:
    if value > 0:
        return 1.0
    if value < 0:
        return -1.0
    return 0.0


def switching_function(s: float, boundary_layer_phi: float) -> float:
    if boundary_layer_phi > 0:
        return clamp(s / boundary_layer_phi, -1.0, 1.0)
    return sign(s)


def sliding_surface(err: ErrorState, cfg: SmcConfig) -> float:
    """Return ``s = c * x1 + x2``."""
    return cfg.surface_slope_c * err[0] + err[1]


def equivalent_control(err: ErrorState, params: ConverterParams, cfg: SmcConfig) -> float:
    """
    Continuous control keeping nominal plant on the surface, not saturated.

    :param err: (ErrorState) tracking error
    :param params: (ConverterParams) nominal converter parameters
    :param cfg: (SmcConfig) controller gains
    """
    x1, x2 = err
    lc = params.lc
    return (lc / params.input_voltage_volt) * (
        cfg.surface_slope_c * x2
        - x1 / lc
        - x2 / params.rc
        + params.reference_voltage_volt / lc
    )


def switching_control(s: float, params: ConverterParams, cfg: SmcConfig) -> float:
    """
    Reaching term ``(L*C / V_in) * eta * sw(s)``, sign chosen so that
    ``ds/dt = -eta * sw(s)`` on the nominal plant.
    """
    return (
        params.lc
        / params.input_voltage_volt
        * cfg.switching_gain_eta
        * switching_function(s, cfg.boundary_layer_phi)
    )


def smc_duty(err: ErrorState, params: ConverterParams, cfg: SmcConfig) -> float:
    """Return ``clamp(u_eq + u_sw, 0, 1)``."""
    s = sliding_surface(err, cfg)
    return clamp(
        equivalent_control(err, params, cfg) + switching_control(s, params, cfg), 0.0, 1.0
    )


def lyapunov_value(s: float) -> float:
    """Return ``V = s^2 / 2``."""
    return 0.5 * s * s


class ClassicSmc(Controller):
    """
    Classic sliding mode controller.

    :param params: (ConverterParams) nominal converter parameters
    :param cfg: (SmcConfig) controller gains
    """

    name = "smc"

    def __init__(self, params: ConverterParams, cfg: SmcConfig = None) -> None:
        super().__init__(params)
        self.cfg = cfg or SmcConfig()

    def update(
        self, time_s: float, state: PlantState, plant_params: ConverterParams, dt_s: float
    ) -> ControlOutput:
        err = error_coordinates(state, plant_params)
        s = sliding_surface(err, self.cfg)
        raw = equivalent_control(err, self.params, self.cfg) + switching_control(
            s, self.params, self.cfg
        )
        duty = clamp(raw, 0.0, 1.0)
        saturated = duty != raw
        self._count(saturated)
        return ControlOutput(duty, s, lyapunov_value(s), math.nan, saturated)
