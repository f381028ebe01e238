"""
ScenarioRunner
##############

Runs closed or open loop simulation of the buck converter for a scenario -
initial parameters, duration, plant model, timed load and input voltage
steps, and additive disturbance - and records the trace.

Plant models and controller rates:

* ``averaged`` - state-space averaged model integrated with RK4 at ``dt_s``,
  controller updated every step, one trace record per step
* ``switched`` - switched model, duty latched at each switching period start
  and integrated with ``substeps`` Euler sub-steps per period, one trace
  record per switching period carrying period v_o min, max and mean;
  controller measures i_L and v_o averaged over the previous period, the
  state itself at the first period

Events take effect at the first sample with time not less than event time,
trace record of that sample already shows new value. Converter starts at
``(0 A, 0 V)``.

Trace CSV columns::

    t,i_l,v_o,duty,s,v_lyap,f_hat,r_load,v_in

ScenarioRunner Sample Usage
===========================

Simulate load step under classic sliding mode control::

    from buck_smc.plugins.models.plant import ConverterParams
    from buck_smc.plugins.controllers.smc import ClassicSmc
    from buck_smc.plugins.runners.ScenarioRunner import Event, Scenario, run_scenario

    params = ConverterParams()
    scn = Scenario(
        params=params,
        duration_s=0.06,
        events=[Event(0.03, "load_step", 2.0)],
    )
    trace = run_scenario(scn, ClassicSmc(params))

ScenarioRunner Reference
========================

.. autoclass:: buck_smc.plugins.runners.ScenarioRunner.Event
.. autoclass:: buck_smc.plugins.runners.ScenarioRunner.Scenario
.. autoclass:: buck_smc.plugins.runners.ScenarioRunner.Trace
   :members:
.. autofunction:: buck_smc.plugins.runners.ScenarioRunner.run_scenario
"""
import copy
import logging
import math
import dataclasses

from typing import List, Tuple

import numpy as np

from ..controllers.base import Controller
from ..models.plant import (
    ConverterParams,
    Disturbance,
    PlantState,
    averaged_derivative,
    integrate_step,
    switched_period_step,
)

log = logging.getLogger(__name__)

EVENT_KINDS = ("load_step", "vin_step")
PLANT_MODELS = ("averaged", "switched")
TRACE_HEADER = ("t", "i_l", "v_o", "duty", "s", "v_lyap", "f_hat", "r_load", "v_in")
TRACE_FIELDS = TRACE_HEADER + ("v_o_min", "v_o_max", "v_o_mean")


@dataclasses.dataclass(frozen=True)
class Event:
    """
    Instantaneous parameter change.

    :param time_s: (float) event time
    :param kind: (str) ``load_step`` - new load resistance, or ``vin_step`` -
        new input voltage
    :param new_value: (float) new resistance in ohm or voltage in volt
    """

    time_s: float
    kind: str
    new_value: float

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(
                "buck-smc:Event unsupported kind '{}', supported - {}".format(
                    self.kind, ", ".join(EVENT_KINDS)
                )
            )
        if not self.new_value > 0:
            raise ValueError(
                "buck-smc:Event 'new_value' must be positive, got '{}'".format(
                    self.new_value
                )
            )
        if not self.time_s >= 0:
            raise ValueError(
                "buck-smc:Event 'time_s' must be nonnegative, got '{}'".format(self.time_s)
            )

    def apply(self, params: ConverterParams) -> ConverterParams:
        if self.kind == "load_step":
            return params.replace(load_resistance_ohm=self.new_value)
        return params.replace(input_voltage_volt=self.new_value)


@dataclasses.dataclass(frozen=True)
class Scenario:
    """
    :param params: (ConverterParams) initial converter parameters, also the
        nominal parameters controllers are built with
    :param duration_s: (float) simulated time
    :param dt_s: (float) averaged model integration step
    :param model: (str) ``averaged`` or ``switched``
    :param events: (tuple) Event items strictly increasing in time
    :param additive_disturbance: (Disturbance) additive disturbance channel
    :param seed: (int) scenario seed
    :param substeps: (int) switched model Euler sub-steps per switching period
    """

    params: ConverterParams = dataclasses.field(default_factory=ConverterParams)
    duration_s: float = 0.06
    dt_s: float = 1e-6
    model: str = "averaged"
    events: Tuple[Event, ...] = ()
    additive_disturbance: Disturbance = dataclasses.field(default_factory=Disturbance)
    seed: int = 0
    substeps: int = 100

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if self.model not in PLANT_MODELS:
            raise ValueError(
                "buck-smc:Scenario unsupported model '{}', supported - {}".format(
                    self.model, ", ".join(PLANT_MODELS)
                )
            )
        if not (self.duration_s >= 0 and math.isfinite(self.duration_s)):
            raise ValueError(
                "buck-smc:Scenario 'duration_s' must be finite and nonnegative, "
                "got '{}'".format(self.duration_s)
            )
        if not self.dt_s > 0:
            raise ValueError(
                "buck-smc:Scenario 'dt_s' must be positive, got '{}'".format(self.dt_s)
            )
        if int(self.substeps) < 1:
            raise ValueError(
                "buck-smc:Scenario 'substeps' must be >= 1, got '{}'".format(self.substeps)
            )
        previous = -math.inf
        for event in self.events:
            if event.time_s <= previous:
                raise ValueError(
                    "buck-smc:Scenario events must be strictly increasing in time, "
                    "got {} after {}".format(event.time_s, previous)
                )
            if event.time_s > self.duration_s:
                raise ValueError(
                    "buck-smc:Scenario event at {} s is outside scenario duration "
                    "{} s".format(event.time_s, self.duration_s)
                )
            previous = event.time_s

    @property
    def sample_period_s(self) -> float:
        if self.model == "switched":
            return self.params.switching_period_s
        return self.dt_s

    def event_indices(self) -> List[int]:
        """Index of the first sample each event applies to."""
        return [
            int(math.ceil(event.time_s / self.sample_period_s - 1e-9))
            for event in self.events
        ]

    def replace(self, **kwargs) -> "Scenario":
        return dataclasses.replace(self, **kwargs)


class Trace:
    """
    Uniformly sampled simulation records, attributes are numpy arrays
    named after ``TRACE_FIELDS``.
    """

    def __init__(self, sample_period_s: float, controller_name: str = "") -> None:
        self.sample_period_s = sample_period_s
        self.controller_name = controller_name
        self.saturation_count = 0
        self.update_count = 0
        self._records = {name: [] for name in TRACE_FIELDS}
        for name in TRACE_FIELDS:
            setattr(self, name, np.zeros(0))

    def append(self, **record) -> None:
        for name in TRACE_FIELDS:
            self._records[name].append(record[name])

    def finalize(self) -> "Trace":
        for name in TRACE_FIELDS:
            setattr(self, name, np.asarray(self._records[name], dtype=float))
        self._records = {name: [] for name in TRACE_FIELDS}
        return self

    def __len__(self) -> int:
        return self.t.size

    def rows(self):
        """Yield tuples of trace CSV columns."""
        columns = [getattr(self, name).tolist() for name in TRACE_HEADER]
        for row in zip(*columns):
            yield row

    def to_dict(self) -> dict:
        return {name: getattr(self, name).tolist() for name in TRACE_FIELDS}


def run_scenario(scn: Scenario, controller: Controller) -> Trace:
    """
    Simulate scenario under supplied controller.

    Controller is deep copied, supplied object is left untouched, so the same
    controller can be used for several runs, including concurrent ones.

    :param scn: (Scenario) scenario to run
    :param controller: (Controller) ClassicSmc, DnnSmc or OpenLoopDuty instance
    :return: Trace object
    """
    controller = copy.deepcopy(controller)
    period = scn.sample_period_s
    steps = int(round(scn.duration_s / period))
    event_steps = scn.event_indices()
    trace = Trace(period, controller.name)
    disturbance = scn.additive_disturbance
    params = scn.params
    state = PlantState(0.0, 0.0)
    measured = state
    next_event = 0
    log.debug(
        "buck-smc:ScenarioRunner {} run started, model {}, {} samples".format(
            controller.name, scn.model, steps
        )
    )
    for k in range(steps):
        t = k * period
        while next_event < len(event_steps) and k >= event_steps[next_event]:
            params = scn.events[next_event].apply(params)
            next_event += 1
        out = controller.update(t, measured, params, period)
        d = disturbance.value(t)
        try:
            if scn.model == "averaged":
                v_o = state.output_voltage_volt
                new_state = integrate_step(
                    state,
                    lambda x: averaged_derivative(x, out.duty, params, d),
                    period,
                    method="rk4",
                )
                v_min = v_max = v_mean = v_o
                measured = new_state
            else:
                new_state, v_min, v_max, v_mean, i_mean = switched_period_step(
                    state, out.duty, params, int(scn.substeps), d
                )
                measured = PlantState(i_mean, v_mean)
        except RuntimeError as e:
            raise RuntimeError(
                "buck-smc:ScenarioRunner plant blow-up at t={} s, last valid time "
                "{} s: {}".format(t + period, t, e)
            )
        trace.append(
            t=t,
            i_l=state.inductor_current_ampere,
            v_o=state.output_voltage_volt,
            duty=out.duty,
            s=out.s,
            v_lyap=out.lyapunov,
            f_hat=out.f_hat,
            r_load=params.load_resistance_ohm,
            v_in=params.input_voltage_volt,
            v_o_min=v_min,
            v_o_max=v_max,
            v_o_mean=v_mean,
        )
        state = new_state
    trace.saturation_count = controller.saturation_count
    trace.update_count = controller.update_count
    log.debug(
        "buck-smc:ScenarioRunner {} run finished, {} of {} updates saturated".format(
            controller.name, controller.saturation_count, controller.update_count
        )
    )
    return trace.finalize()
