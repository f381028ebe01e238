from .base import Controller, ControlOutput
from .smc import (
    SmcConfig,
    ClassicSmc,
    sliding_surface,
    equivalent_control,
    switching_control,
    smc_duty,
    lyapunov_value,
)
from .open_loop import OpenLoopDuty
from .adaptive_smc import (
    AdaptiveSmcState,
    DnnSmc,
    dnn_smc_duty,
    dnn_smc_update,
    true_f,
    composite_lyapunov,
    representable_closed_loop,
)

__all__ = (
    "Controller",
    "ControlOutput",
    "SmcConfig",
    "ClassicSmc",
    "sliding_surface",
    "equivalent_control",
    "switching_control",
    "smc_duty",
    "lyapunov_value",
    "OpenLoopDuty",
    "AdaptiveSmcState",
    "DnnSmc",
    "dnn_smc_duty",
    "dnn_smc_update",
    "true_f",
    "composite_lyapunov",
    "representable_closed_loop",
)
