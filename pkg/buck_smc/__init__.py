"""
Overview
########

Buck-smc package is a collection of models, controllers and functions to
simulate a synchronous DC-DC buck converter regulated by sliding mode control,
classic or with adaptive neural network estimate of the uncertain dynamics,
and to compare the two under start-up, load step and input voltage step.

Main building blocks:

* plant models - switched and averaged converter dynamics, error coordinates
* controllers - classic SMC, adaptive neural SMC, open loop duty
* neural - multilayer perceptron, trainer with SGD, Adam and RMSProp,
  adaptive output layer
* runners - scenario runner, threads based queue runner
* functions - metrics, dataset generation, controllers comparison, results
  serialization, tables, files and SVG plots
"""
# models
from .plugins.models import ConverterParams, PlantState, ErrorState, Disturbance

# controllers
from .plugins.controllers import ClassicSmc, SmcConfig, DnnSmc, OpenLoopDuty

# neural
from .plugins.neural import Mlp, Dataset, TrainConfig, AdaptiveHead

# runners
from .plugins.runners import QueueRunner, Scenario, Event, Trace, run_scenario

# functions
from .plugins.functions import ResultSerializer
from .plugins.functions import TabulateFormatter
from .plugins.functions import DumpResults
from .plugins.functions import SvgPlotter
from .plugins.functions import compute_metrics, compare_controllers, generate_dataset

# utils
from .utils.run_config import RunConfig, load_run_config

__all__ = (
    "ConverterParams",
    "PlantState",
    "ErrorState",
    "Disturbance",
    "ClassicSmc",
    "SmcConfig",
    "DnnSmc",
    "OpenLoopDuty",
    "Mlp",
    "Dataset",
    "TrainConfig",
    "AdaptiveHead",
    "QueueRunner",
    "Scenario",
    "Event",
    "Trace",
    "run_scenario",
    "ResultSerializer",
    "TabulateFormatter",
    "DumpResults",
    "SvgPlotter",
    "compute_metrics",
    "compare_controllers",
    "generate_dataset",
    "RunConfig",
    "load_run_config",
)
