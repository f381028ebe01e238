"""
Controller interface
####################

Variable structure controllers share one interface: at every controller
update they receive the measured converter state and the plant parameters
in effect, and return a ``ControlOutput`` with the duty cycle applied
until the next update and diagnostics recorded into the trace.

Controllers keep the nominal ``ConverterParams`` they were built with for
their model terms. Measured plant parameters only feed the error
coordinates, ``x2`` being computed from capacitor current.

Reference
=========

.. autoclass:: buck_smc.plugins.controllers.base.ControlOutput
.. autoclass:: buck_smc.plugins.controllers.base.Controller
   :members:
"""
import logging
import math

from typing import NamedTuple

from ..models.plant import ConverterParams, PlantState

log = logging.getLogger(__name__)


class ControlOutput(NamedTuple):
    duty: float
    s: float
    lyapunov: float
    f_hat: float = math.nan
    saturated: bool = False


class Controller:
    """
    Base class for duty cycle controllers.

    :param params: (ConverterParams) nominal converter parameters
    """

    name = "controller"

    def __init__(self, params: ConverterParams) -> None:
        self.params = params
        self.saturation_count = 0
        self.update_count = 0

    def update(
        self, time_s: float, state: PlantState, plant_params: ConverterParams, dt_s: float
    ) -> ControlOutput:
        raise NotImplementedError(
            "buck-smc:{} does not implement update".format(self.__class__.__name__)
        )

    def _count(self, saturated: bool) -> None:
        self.update_count += 1
        if saturated:
            self.saturation_count += 1


def clamp(value: float, low: float, high: float) -> float:
    return low if value < low else high if value > high else value
