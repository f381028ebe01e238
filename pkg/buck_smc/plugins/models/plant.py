"""
plant
#####

Buck converter dynamics in switched and state-space averaged form, tracking
error coordinates, additive disturbance injection and fixed-step integration.

Circuit model, resistive load, ideal switch and diode, continuous conduction::

    di_L/dt = S_C * V_in / L - v_o / L
    dv_o/dt = i_L / C - v_o / (R * C)

Averaged model replaces binary gate ``S_C`` with duty cycle ``D``.

Error coordinates::

    x1 = V_ref - v_o
    x2 = dx1/dt = -dv_o/dt = -(i_L - v_o / R) / C

plant sample usage
==================

Integrate averaged model for 1 ms at fixed duty::

    from buck_smc.plugins.models.plant import (
        ConverterParams, PlantState, averaged_derivative, integrate_step
    )

    params = ConverterParams()
    state = PlantState(0.0, 0.0)
    for _ in range(1000):
        state = integrate_step(
            state,
            lambda x: averaged_derivative(x, 5.0 / 12.0, params),
            1e-6,
        )

plant reference
===============

.. autoclass:: buck_smc.plugins.models.plant.ConverterParams
.. autoclass:: buck_smc.plugins.models.plant.PlantState
.. autoclass:: buck_smc.plugins.models.plant.ErrorState
.. autoclass:: buck_smc.plugins.models.plant.PeriodResult
.. autoclass:: buck_smc.plugins.models.plant.Disturbance
.. autofunction:: buck_smc.plugins.models.plant.switched_derivative
.. autofunction:: buck_smc.plugins.models.plant.averaged_derivative
.. autofunction:: buck_smc.plugins.models.plant.error_dynamics
.. autofunction:: buck_smc.plugins.models.plant.error_coordinates
.. autofunction:: buck_smc.plugins.models.plant.pwm_gate
.. autofunction:: buck_smc.plugins.models.plant.integrate_step
.. autofunction:: buck_smc.plugins.models.plant.switched_period_step
"""
import logging
import math
import dataclasses

from typing import Callable, NamedTuple, Tuple

log = logging.getLogger(__name__)

DISTURBANCE_KINDS = ("none", "additive_step", "additive_sine")
INTEGRATION_METHODS = ("rk4", "euler")


@dataclasses.dataclass(frozen=True)
class ConverterParams:
    """
    Physical circuit constants, defaults are 12 V to 5 V, 160 uH,
    200 uF, 10 Ohm, 25 kHz converter.

    :param inductance_henry: (float) L
    :param capacitance_farad: (float) C
    :param load_resistance_ohm: (float) R
    :param input_voltage_volt: (float) V_in
    :param reference_voltage_volt: (float) V_ref
    :param switching_frequency_hz: (float) f_s
    """

    inductance_henry: float = 160e-6
    capacitance_farad: float = 200e-6
    load_resistance_ohm: float = 10.0
    input_voltage_volt: float = 12.0
    reference_voltage_volt: float = 5.0
    switching_frequency_hz: float = 25000.0

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValueError(
                    "buck-smc:ConverterParams '{}' must be a finite number, got '{}'".format(
                        field.name, value
                    )
                )
            if value <= 0:
                raise ValueError(
                    "buck-smc:ConverterParams '{}' must be strictly positive, got '{}'".format(
                        field.name, value
                    )
                )
        if self.reference_voltage_volt > self.input_voltage_volt:
            raise ValueError(
                "buck-smc:ConverterParams 'reference_voltage_volt' {} must not exceed "
                "'input_voltage_volt' {}, buck topology can only step down".format(
                    self.reference_voltage_volt, self.input_voltage_volt
                )
            )

    @property
    def switching_period_s(self) -> float:
        return 1.0 / self.switching_frequency_hz

    @property
    def lc(self) -> float:
        return self.inductance_henry * self.capacitance_farad

    @property
    def rc(self) -> float:
        return self.load_resistance_ohm * self.capacitance_farad

    def replace(self, **kwargs) -> "ConverterParams":
        return dataclasses.replace(self, **kwargs)


class PlantState(NamedTuple):
    """Averaged or instantaneous converter state."""

    inductor_current_ampere: float
    output_voltage_volt: float


class ErrorState(NamedTuple):
    """Tracking error state, x1 in volts and x2 in volts per second."""

    x1_volt: float
    x2_volt_per_s: float


class PeriodResult(NamedTuple):
    """Switching period outcome, end state and per-period output statistics."""

    state: PlantState
    v_min: float
    v_max: float
    v_mean: float
    i_mean: float


@dataclasses.dataclass(frozen=True)
class Disturbance:
    """
    Additive disturbance d(t) entering the second error equation.

    :param kind: (str) one of ``none``, ``additive_step``, ``additive_sine``
    :param magnitude: (float) amplitude of d(t), V/s^2
    :param start_time_s: (float) time when disturbance starts
    :param bound_T: (float) upper bound T of |d(t)|
    :param frequency_hz: (float) frequency of ``additive_sine`` disturbance
    """

    kind: str = "none"
    magnitude: float = 0.0
    start_time_s: float = 0.0
    bound_T: float = 0.0
    frequency_hz: float = 1000.0

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ValueError(
                "buck-smc:Disturbance unsupported kind '{}', supported - {}".format(
                    self.kind, ", ".join(DISTURBANCE_KINDS)
                )
            )
        if self.start_time_s < 0 or self.bound_T < 0:
            raise ValueError(
                "buck-smc:Disturbance 'start_time_s' and 'bound_T' must be nonnegative"
            )
        if self.kind != "none" and abs(self.magnitude) > self.bound_T:
            raise ValueError(
                "buck-smc:Disturbance |magnitude| {} exceeds bound_T {}".format(
                    abs(self.magnitude), self.bound_T
                )
            )

    def value(self, time_s: float) -> float:
        if self.kind == "none" or time_s < self.start_time_s:
            return 0.0
        if self.kind == "additive_step":
            return self.magnitude
        return self.magnitude * math.sin(
            2.0 * math.pi * self.frequency_hz * (time_s - self.start_time_s)
        )


def _check_duty(duty: float, name: str) -> None:
    if not 0.0 <= duty <= 1.0:
        raise ValueError(
            "buck-smc:{} duty must be within [0, 1], got '{}'".format(name, duty)
        )


def switched_derivative(
    state: PlantState, gate: int, params: ConverterParams, disturbance: float = 0.0
) -> PlantState:
    """
    Switched converter model derivative.

    :param state: (PlantState) inductor current and output voltage
    :param gate: (int) switch state S_C, 0 or 1
    :param params: (ConverterParams) circuit constants
    :param disturbance: (float) additive disturbance d, enters dx2/dt
    :return: PlantState with (di_L/dt, dv_o/dt)
    """
    i_l, v_o = state
    return PlantState(
        gate * params.input_voltage_volt / params.inductance_henry
        - v_o / params.inductance_henry
        - params.capacitance_farad * disturbance,
        i_l / params.capacitance_farad - v_o / params.rc,
    )


def averaged_derivative(
    state: PlantState, duty: float, params: ConverterParams, disturbance: float = 0.0
) -> PlantState:
    """
    State-space averaged converter model derivative, identical to
    ``switched_derivative`` with gate replaced by duty cycle.

    :param state: (PlantState) averaged inductor current and output voltage
    :param duty: (float) duty cycle D within [0, 1]
    :param params: (ConverterParams) circuit constants
    :param disturbance: (float) additive disturbance d, enters dx2/dt
    """
    _check_duty(duty, "averaged_derivative")
    i_l, v_o = state
    return PlantState(
        duty * params.input_voltage_volt / params.inductance_henry
        - v_o / params.inductance_henry
        - params.capacitance_farad * disturbance,
        i_l / params.capacitance_farad - v_o / params.rc,
    )


def error_dynamics(
    err: ErrorState, duty: float, params: ConverterParams, d: float = 0.0
) -> ErrorState:
    """
    Tracking error dynamics::

        dx1/dt = x2
        dx2/dt = -x1/(LC) - x2/(RC) + V_ref/(LC) - (V_in/(LC)) * D + d

    :param err: (ErrorState) tracking error
    :param duty: (float) duty cycle within [0, 1]
    :param params: (ConverterParams) circuit constants
    :param d: (float) additive disturbance value
    """
    _check_duty(duty, "error_dynamics")
    x1, x2 = err
    lc = params.lc
    return ErrorState(
        x2,
        -x1 / lc
        - x2 / params.rc
        + params.reference_voltage_volt / lc
        - params.input_voltage_volt / lc * duty
        + d,
    )


def error_coordinates(state: PlantState, params: ConverterParams) -> ErrorState:
    """
    Map physical state to tracking error coordinates, x2 is computed from
    capacitor current instead of differentiating output voltage.
    """
    i_l, v_o = state
    return ErrorState(
        params.reference_voltage_volt - v_o,
        -(i_l - v_o / params.load_resistance_ohm) / params.capacitance_farad,
    )


def pwm_gate(time_in_period_s: float, duty: float, params: ConverterParams) -> int:
    """
    Fixed frequency PWM comparator, trailing edge modulation.

    Duty must be latched by the caller once per switching period.

    :param time_in_period_s: (float) time, reduced modulo switching period
    :param duty: (float) latched duty cycle within [0, 1]
    :return: 1 if switch conducts, 0 otherwise
    """
    _check_duty(duty, "pwm_gate")
    period = params.switching_period_s
    phase = math.fmod(time_in_period_s, period) / period
    if phase < 0:
        phase += 1.0
    return 1 if phase < duty else 0


def _axpy(state: Tuple[float, ...], k: Tuple[float, ...], h: float) -> Tuple[float, ...]:
    return tuple(s + h * ki for s, ki in zip(state, k))


def _rebuild(state, values):
    if hasattr(state, "_fields"):
        return state.__class__(*values)
    return tuple(values)


def integrate_step(
    state: Tuple[float, ...],
    derivative: Callable,
    dt_s: float,
    method: str = "rk4",
):
    """
    Advance state over one fixed step.

    :param state: (tuple) PlantState or any tuple of floats
    :param derivative: (callable) pure function mapping state to its derivative,
        inputs such as duty or gate are held constant over the step
    :param dt_s: (float) step size, must be positive
    :param method: (str) ``rk4`` - classical fourth order Runge-Kutta, used for the
        averaged model, or ``euler`` - forward Euler, used for switched sub-steps
    :return: new state of the same type
    """
    if not dt_s > 0:
        raise ValueError(
            "buck-smc:integrate_step dt_s must be positive, got '{}'".format(dt_s)
        )
    if method == "rk4":
        k1 = derivative(state)
        k2 = derivative(_rebuild(state, _axpy(state, k1, dt_s / 2.0)))
        k3 = derivative(_rebuild(state, _axpy(state, k2, dt_s / 2.0)))
        k4 = derivative(_rebuild(state, _axpy(state, k3, dt_s)))
        values = tuple(
            s + dt_s / 6.0 * (a + 2.0 * b + 2.0 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
    elif method == "euler":
        values = _axpy(state, derivative(state), dt_s)
    else:
        raise ValueError(
            "buck-smc:integrate_step unsupported method '{}', supported - {}".format(
                method, ", ".join(INTEGRATION_METHODS)
            )
        )
    if not all(math.isfinite(v) for v in values):
        raise RuntimeError(
            "buck-smc:integrate_step non-finite state after step: {}".format(values)
        )
    return _rebuild(state, values)


def switched_period_step(
    state: PlantState,
    duty: float,
    params: ConverterParams,
    substeps: int = 100,
    disturbance: float = 0.0,
):
    """
    Integrate switched model over one switching period with forward Euler
    sub-steps of ``T_s / substeps``. Sub-step that contains the comparator
    edge is split at the edge, so conducted time equals ``duty * T_s``.
    Switch position of every segment comes from ``pwm_gate`` sampled at
    segment midpoint.

    :param state: (PlantState) state at period start
    :param duty: (float) duty latched at period start
    :param params: (ConverterParams) circuit constants
    :param substeps: (int) number of sub-steps per period
    :param disturbance: (float) additive disturbance held over the period
    :return: PeriodResult with state at period end, v_o min, max and mean, i_L mean
    """
    _check_duty(duty, "switched_period_step")
    period = params.switching_period_s
    h = period / substeps
    t_edge = duty * period
    v_min = v_max = state.output_voltage_volt
    v_area = i_area = 0.0
    derivatives = {
        gate: (lambda x, gate=gate: switched_derivative(x, gate, params, disturbance))
        for gate in (0, 1)
    }

    for k in range(substeps):
        a = k * h
        b = a + h
        v_start, i_start = state.output_voltage_volt, state.inductor_current_ampere
        bounds = (a, t_edge, b) if a < t_edge < b else (a, b)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            gate = pwm_gate(0.5 * (lo + hi), duty, params)
            state = integrate_step(state, derivatives[gate], hi - lo, method="euler")
        v_end = state.output_voltage_volt
        v_area += 0.5 * (v_start + v_end) * h
        i_area += 0.5 * (i_start + state.inductor_current_ampere) * h
        v_min = min(v_min, v_end)
        v_max = max(v_max, v_end)

    return PeriodResult(state, v_min, v_max, v_area / period, i_area / period)
