"""
compare
#######

Classic versus adaptive neural sliding mode control comparison on three
experiments run on the averaged model:

* ``startup`` - cold start at nominal parameters
* ``load_step`` - load resistance steps from 10 to 2 Ohm at event time
* ``vin_step`` - input voltage steps from 12 to 13 V at event time

Every experiment runs under every controller, report has one row per
controller and experiment plus ``ratio`` rows - second controller value
divided by first controller value, 1 when values are equal.

Report columns::

    controller,experiment,settling_ms,overshoot_v,recovery_ms,ripple_pp_v,ss_error_v

A small input voltage step may keep v_o inside the settling band, so voltage
recovery alone says little. ``event_rows`` lists every event with voltage and
inductor current recovery side by side::

    controller,experiment,event_time_ms,overshoot_v,recovery_ms,current_recovery_ms

compare sample usage
====================

Compare controllers::

    from buck_smc.plugins.functions.compare import compare_controllers, default_experiments

    smc = SmcConfig(surface_slope_c=500.0)
    report = compare_controllers(
        default_experiments(params),
        {"smc": ClassicSmc(params, smc), "dnn_smc": DnnSmc(params, net, smc)},
    )
    report.rows     # list of report dictionaries
    report.traces   # {"smc": {"startup": Trace, ...}, "dnn_smc": {...}}

compare reference
=================

.. autofunction:: buck_smc.plugins.functions.compare.default_experiments
.. autofunction:: buck_smc.plugins.functions.compare.compare_controllers
.. autofunction:: buck_smc.plugins.functions.compare.ratio
.. autofunction:: buck_smc.plugins.functions.compare.event_rows
"""
import logging
import math
import dataclasses

from typing import Dict, List

from ..controllers.base import Controller
from ..models.plant import ConverterParams
from ..runners.QueueRunner import QueueRunner
from ..runners.ScenarioRunner import Event, Scenario, Trace, run_scenario
from .metrics import Metrics, compute_metrics

log = logging.getLogger(__name__)

REPORT_HEADER = (
    "controller",
    "experiment",
    "settling_ms",
    "overshoot_v",
    "recovery_ms",
    "ripple_pp_v",
    "ss_error_v",
)
METRIC_COLUMNS = REPORT_HEADER[2:]
EVENT_HEADER = (
    "controller",
    "experiment",
    "event_time_ms",
    "overshoot_v",
    "recovery_ms",
    "current_recovery_ms",
)


@dataclasses.dataclass
class ComparisonReport:
    rows: List[dict]
    metrics: Dict[str, Dict[str, Metrics]]
    traces: Dict[str, Dict[str, Trace]]
    experiments: Dict[str, Scenario]


def default_experiments(
    params: ConverterParams = None,
    duration_s: float = 0.06,
    event_time_s: float = 0.03,
    dt_s: float = 1e-6,
    load_step_ohm: float = 2.0,
    vin_step_volt: float = 13.0,
    seed: int = 0,
) -> Dict[str, Scenario]:
    """Return startup, load step and input voltage step scenarios."""
    params = params or ConverterParams()
    base = Scenario(params=params, duration_s=duration_s, dt_s=dt_s, seed=seed)
    return {
        "startup": base,
        "load_step": base.replace(events=[Event(event_time_s, "load_step", load_step_ohm)]),
        "vin_step": base.replace(events=[Event(event_time_s, "vin_step", vin_step_volt)]),
    }


def ratio(value: float, reference: float) -> float:
    """
    Return ``value / reference``, 1 if values are equal or both ``nan``,
    ``inf`` if reference is 0.
    """
    if value == reference or (math.isnan(value) and math.isnan(reference)):
        return 1.0
    if math.isnan(value) or math.isnan(reference):
        return math.nan
    if reference == 0:
        return math.inf
    return value / reference


def compare_controllers(
    experiments: Dict[str, Scenario],
    controllers: Dict[str, Controller],
    num_workers: int = 1,
) -> ComparisonReport:
    """
    Run every experiment under every controller and assemble report.

    :param experiments: (dict) experiment name to Scenario mapping
    :param controllers: (dict) controller name to Controller mapping, ratio rows
        are produced when exactly two controllers given
    :param num_workers: (int) QueueRunner worker threads
    """
    jobs = {
        (controller_name, experiment): {
            "fun": run_scenario,
            "kwargs": {"scn": scn, "controller": controller},
        }
        for controller_name, controller in controllers.items()
        for experiment, scn in experiments.items()
    }
    traces = QueueRunner(num_workers).run(jobs)

    rows, metrics, traces_by_name = [], {}, {}
    for (controller_name, experiment), trace in traces.items():
        result = compute_metrics(trace, experiments[experiment])
        metrics.setdefault(controller_name, {})[experiment] = result
        traces_by_name.setdefault(controller_name, {})[experiment] = trace
        rows.append(
            {"controller": controller_name, "experiment": experiment, **result.report_row()}
        )
        log.debug(
            "buck-smc:compare {} {} settling {} s".format(
                controller_name, experiment, result.settling_time_s
            )
        )

    names = list(controllers)
    if len(names) == 2:
        first, second = names
        for experiment in experiments:
            a = metrics[first][experiment].report_row()
            b = metrics[second][experiment].report_row()
            rows.append(
                {
                    "controller": "ratio",
                    "experiment": experiment,
                    **{k: ratio(b[k], a[k]) for k in METRIC_COLUMNS},
                }
            )
    return ComparisonReport(
        rows=rows, metrics=metrics, traces=traces_by_name, experiments=experiments
    )


def event_rows(report: ComparisonReport) -> List[dict]:
    """
    Return one row per controller, experiment and event with voltage
    overshoot, voltage recovery and inductor current recovery, times in
    milliseconds. Experiments without events give no rows.
    """
    rows = []
    for controller_name, by_experiment in report.metrics.items():
        for experiment, result in by_experiment.items():
            events = report.experiments[experiment].events
            for event, overshoot, recovery, current_recovery in zip(
                events,
                result.event_overshoot_v,
                result.event_recovery_s,
                result.event_current_recovery_s,
            ):
                rows.append(
                    {
                        "controller": controller_name,
                        "experiment": experiment,
                        "event_time_ms": event.time_s * 1e3,
                        "overshoot_v": overshoot,
                        "recovery_ms": recovery * 1e3,
                        "current_recovery_ms": current_recovery * 1e3,
                    }
                )
    return rows
