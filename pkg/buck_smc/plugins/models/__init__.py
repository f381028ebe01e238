from .plant import (
    ConverterParams,
    PlantState,
    ErrorState,
    PeriodResult,
    Disturbance,
    switched_derivative,
    averaged_derivative,
    error_dynamics,
    error_coordinates,
    pwm_gate,
    integrate_step,
    switched_period_step,
)

__all__ = (
    "ConverterParams",
    "PlantState",
    "ErrorState",
    "PeriodResult",
    "Disturbance",
    "switched_derivative",
    "averaged_derivative",
    "error_dynamics",
    "error_coordinates",
    "pwm_gate",
    "integrate_step",
    "switched_period_step",
)
