"""
dataset_fun
###########

Training dataset generation. Each scenario is simulated under classic
sliding mode control, samples ``(e, e_dot, f)`` are taken once per
switching period, skipping the start of every run, concatenated across
runs and shuffled with seed.

Default operating grid covers load resistances ``2, 5, 10`` Ohm and input
voltages ``10, 12, 14`` V, each run being a startup followed by one load
step - to 10 Ohm from lower loads, to 2 Ohm from 10 Ohm. Every grid point is
run for each sliding surface slope given, so the dataset covers the
trajectories of controllers using either slope.

Sampling stride is one row per switching period, 40 controller samples of
1 us on the averaged model, instead of one row per controller sample.
``stride_periods`` widens it further. Coverage of ``f`` is bounded by the
physics of the grid: trajectories keep ``f`` at or below about
``V_ref / (L*C)``, so the default grid is expected to reach
``min f <= 0.8 * V_ref / (L*C)`` and ``max f >= 0.95 * V_ref / (L*C)``, not
``1.2 * V_ref / (L*C)``.

dataset_fun sample usage
========================

Generate and save default dataset::

    from buck_smc.plugins.functions.dataset_fun import default_dataset_scenarios, generate_dataset
    from buck_smc.plugins.neural.dataset import save_dataset

    scenarios = default_dataset_scenarios()
    data = generate_dataset(scenarios, surface_slopes=(500.0, 1000.0), seed=0)
    save_dataset(data, "dataset.csv")

dataset_fun reference
=====================

.. autofunction:: buck_smc.plugins.functions.dataset_fun.default_dataset_scenarios
.. autofunction:: buck_smc.plugins.functions.dataset_fun.generate_dataset
.. autofunction:: buck_smc.plugins.functions.dataset_fun.trace_samples
"""
import logging

from typing import List, Sequence

import numpy as np

from ..controllers.smc import ClassicSmc, SmcConfig
from ..models.plant import ConverterParams
from ..neural.dataset import Dataset
from ..runners.QueueRunner import QueueRunner
from ..runners.ScenarioRunner import Event, Scenario, Trace, run_scenario

log = logging.getLogger(__name__)


def default_dataset_scenarios(
    params: ConverterParams = None,
    load_resistances: Sequence[float] = (2.0, 5.0, 10.0),
    input_voltages: Sequence[float] = (10.0, 12.0, 14.0),
    duration_s: float = 0.04,
    load_step_time_s: float = 0.02,
    dt_s: float = 1e-6,
    seed: int = 0,
) -> List[Scenario]:
    """
    Build operating grid scenarios on the averaged model.

    :param params: (ConverterParams) base parameters, grid overrides R and V_in
    :param load_resistances: (list) initial load resistances
    :param input_voltages: (list) input voltages
    :param duration_s: (float) run duration
    :param load_step_time_s: (float) load step time
    """
    params = params or ConverterParams()
    scenarios = []
    for resistance in load_resistances:
        step_to = 10.0 if resistance < 10.0 else 2.0
        for voltage in input_voltages:
            scenarios.append(
                Scenario(
                    params=params.replace(
                        load_resistance_ohm=resistance, input_voltage_volt=voltage
                    ),
                    duration_s=duration_s,
                    dt_s=dt_s,
                    events=[Event(load_step_time_s, "load_step", step_to)],
                    seed=seed,
                )
            )
    return scenarios


def trace_samples(
    trace: Trace, scn: Scenario, stride_periods: int = 1, skip_s: float = 2e-4
) -> np.ndarray:
    """
    Extract ``(e, e_dot, f)`` rows from trace, one every ``stride_periods``
    switching periods, ignoring samples before ``skip_s``. Stride is rounded to
    whole trace samples, at least one.

    Error coordinates and ``f`` use the load resistance in effect at the sample.

    :return: ``(P, 3)`` array
    """
    params = scn.params
    stride = max(1, int(round(stride_periods * params.switching_period_s / trace.sample_period_s)))
    start = int(np.ceil(skip_s / trace.sample_period_s - 1e-9))
    idx = np.arange(start, len(trace), stride)
    i_l, v_o, r = trace.i_l[idx], trace.v_o[idx], trace.r_load[idx]
    c = params.capacitance_farad
    v_dot = (i_l - v_o / r) / c
    e = params.reference_voltage_volt - v_o
    e_dot = -v_dot
    f = v_o / params.lc + v_dot / (r * c)
    return np.column_stack((e, e_dot, f))


def generate_dataset(
    scenarios: List[Scenario],
    surface_slopes: Sequence[float] = (500.0,),
    smc_cfg: SmcConfig = None,
    seed: int = 0,
    stride_periods: int = 1,
    skip_s: float = 2e-4,
    num_workers: int = 1,
) -> Dataset:
    """
    Simulate scenarios with classic sliding mode control and sample training rows.

    :param scenarios: (list) Scenario objects, at least one
    :param surface_slopes: (list) sliding surface slopes, every scenario runs once per slope
    :param smc_cfg: (SmcConfig) remaining controller gains
    :param seed: (int) shuffle seed
    :param stride_periods: (int) switching periods between samples
    :param skip_s: (float) time skipped at the start of each run
    :param num_workers: (int) QueueRunner worker threads
    :return: shuffled Dataset
    """
    if not scenarios:
        raise ValueError("buck-smc:dataset_fun scenario list is empty")
    smc_cfg = smc_cfg or SmcConfig()
    jobs = {}
    for index, scn in enumerate(scenarios):
        for slope in surface_slopes:
            controller = ClassicSmc(scn.params, smc_cfg.replace(surface_slope_c=slope))
            jobs[(index, slope)] = {
                "fun": run_scenario,
                "kwargs": {"scn": scn, "controller": controller},
            }
    traces = QueueRunner(num_workers).run(jobs)
    chunks = [
        trace_samples(trace, scenarios[index], stride_periods, skip_s)
        for (index, _), trace in traces.items()
    ]
    rows = np.concatenate(chunks) if chunks else np.zeros((0, 3))
    if rows.shape[0] == 0:
        raise ValueError("buck-smc:dataset_fun scenarios produced empty dataset")
    log.debug(
        "buck-smc:dataset_fun generated {} rows from {} runs".format(rows.shape[0], len(jobs))
    )
    return Dataset(rows[:, :2], rows[:, 2]).shuffled(seed)
