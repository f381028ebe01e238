"""
open_loop
#########

Constant duty controller, used to check plant equilibrium and state-space
averaging fidelity. Sliding surface value is reported for diagnostics only.

.. autoclass:: buck_smc.plugins.controllers.open_loop.OpenLoopDuty
"""
import logging
import math

from ..models.plant import ConverterParams, PlantState, error_coordinates
from .base import Controller, ControlOutput
from .smc import SmcConfig, lyapunov_value, sliding_surface

log = logging.getLogger(__name__)


class OpenLoopDuty(Controller):
    """
    :param params: (ConverterParams) nominal converter parameters
    :param duty: (float) constant duty, defaults to ``V_ref / V_in``
    :param cfg: (SmcConfig) surface used for diagnostic ``s`` values
    """

    name = "open_loop"

    def __init__(
        self, params: ConverterParams, duty: float = None, cfg: SmcConfig = None
    ) -> None:
        super().__init__(params)
        if duty is None:
            duty = params.reference_voltage_volt / params.input_voltage_volt
        if not 0.0 <= duty <= 1.0:
            raise ValueError(
                "buck-smc:OpenLoopDuty duty must be within [0, 1], got '{}'".format(duty)
            )
        self.duty = duty
        self.cfg = cfg or SmcConfig()

    def update(
        self, time_s: float, state: PlantState, plant_params: ConverterParams, dt_s: float
    ) -> ControlOutput:
        s = sliding_surface(error_coordinates(state, plant_params), self.cfg)
        self._count(False)
        return ControlOutput(self.duty, s, lyapunov_value(s), math.nan, False)
