"""
metrics
#######

Performance figures of a simulated trace.

Trace is split into windows at event samples - startup window from time 0
to the first event, and one window per event. Band is ``+-2%`` of reference
voltage by default.

* settling time - in startup window, time of the sample following the last
  sample outside the band; 0 if never outside; unsettled (``nan``) if the
  last window sample is outside the band or trace stays in band for less
  than ``hold_s`` before window end
* overshoot - startup: ``max(0, max(v_o) - V_ref)``; per event:
  ``max(|v_o - V_ref|)`` over event window; ``overshoot_v`` is the maximum
  over events, startup overshoot if there are no events
* recovery time - per event, same rule as settling time measured from event
  time; current recovery uses ``+-2%`` band around mean inductor current over
  the final 10% of the event window
* ripple - peak to peak of v_o over final 10% of the trace, using per period
  min and max of the switched model
* steady state error - ``|mean(v_o) - V_ref|`` over final 10% of the trace

metrics reference
=================

.. autoclass:: buck_smc.plugins.functions.metrics.Metrics
.. autofunction:: buck_smc.plugins.functions.metrics.compute_metrics
"""
import logging
import math
import dataclasses

from typing import List

import numpy as np

from ..runners.ScenarioRunner import Scenario, Trace

log = logging.getLogger(__name__)


@dataclasses.dataclass
class Metrics:
    settling_time_s: float
    settled: bool
    overshoot_v: float
    recovery_time_s: float
    ripple_pp_v: float
    steady_state_error_v: float
    startup_overshoot_v: float = 0.0
    event_overshoot_v: List[float] = dataclasses.field(default_factory=list)
    event_recovery_s: List[float] = dataclasses.field(default_factory=list)
    event_current_recovery_s: List[float] = dataclasses.field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def report_row(self) -> dict:
        """Report columns, times in milliseconds."""
        return {
            "settling_ms": self.settling_time_s * 1e3,
            "overshoot_v": self.overshoot_v,
            "recovery_ms": self.recovery_time_s * 1e3,
            "ripple_pp_v": self.ripple_pp_v,
            "ss_error_v": self.steady_state_error_v,
        }


def _tail(n: int, fraction: float = 0.1) -> int:
    return max(1, int(n * fraction))


def band_entry_time(
    t: np.ndarray, values: np.ndarray, target: float, half_width: float, hold_s: float
) -> float:
    """
    Time from window start to the sample following the last out of band
    sample, ``nan`` if the window ends out of band or in band hold is shorter
    than ``hold_s``.
    """
    outside = np.abs(values - target) > half_width
    if not outside.any():
        return 0.0
    last_out = int(np.flatnonzero(outside)[-1])
    if last_out == values.size - 1:
        return math.nan
    entry = last_out + 1
    if t[-1] - t[entry] < hold_s:
        return math.nan
    return float(t[entry] - t[0])


def compute_metrics(
    trace: Trace, scn: Scenario, band: float = 0.02, hold_s: float = 1e-3
) -> Metrics:
    """
    :param trace: (Trace) simulated trace, not empty
    :param scn: (Scenario) scenario the trace was produced with
    :param band: (float) relative half width of the settling band
    :param hold_s: (float) minimum in band time before window end
    """
    n = len(trace)
    if n == 0:
        raise ValueError("buck-smc:metrics trace is empty")
    v_ref = scn.params.reference_voltage_volt
    half_width = band * v_ref
    bounds = [0] + [min(i, n) for i in scn.event_indices()] + [n]
    t, v, i_l = trace.t, trace.v_o, trace.i_l

    # startup window
    start, end = bounds[0], bounds[1]
    if end > start:
        settling = band_entry_time(
            t[start:end], v[start:end], v_ref, half_width, hold_s
        )
        startup_overshoot = max(0.0, float(np.max(v[start:end])) - v_ref)
    else:
        settling, startup_overshoot = math.nan, 0.0
    if math.isnan(settling):
        log.debug("buck-smc:metrics startup did not settle")

    # event windows
    event_overshoot, event_recovery, event_current_recovery = [], [], []
    for start, end in zip(bounds[1:-1], bounds[2:]):
        if end <= start:
            event_overshoot.append(0.0)
            event_recovery.append(math.nan)
            event_current_recovery.append(math.nan)
            continue
        tw, vw, iw = t[start:end], v[start:end], i_l[start:end]
        event_overshoot.append(float(np.max(np.abs(vw - v_ref))))
        event_recovery.append(band_entry_time(tw, vw, v_ref, half_width, hold_s))
        i_final = float(np.mean(iw[-_tail(iw.size):]))
        event_current_recovery.append(
            band_entry_time(tw, iw, i_final, band * abs(i_final), hold_s)
        )

    if event_overshoot:
        overshoot = max(event_overshoot)
        recovery = (
            math.nan if any(math.isnan(r) for r in event_recovery) else max(event_recovery)
        )
    else:
        overshoot, recovery = startup_overshoot, 0.0

    tail = _tail(n)
    ripple = float(np.max(trace.v_o_max[-tail:]) - np.min(trace.v_o_min[-tail:]))
    ss_error = abs(float(np.mean(trace.v_o_mean[-tail:])) - v_ref)

    return Metrics(
        settling_time_s=settling,
        settled=not math.isnan(settling),
        overshoot_v=overshoot,
        recovery_time_s=recovery,
        ripple_pp_v=ripple,
        steady_state_error_v=ss_error,
        startup_overshoot_v=startup_overshoot,
        event_overshoot_v=event_overshoot,
        event_recovery_s=event_recovery,
        event_current_recovery_s=event_current_recovery,
    )
