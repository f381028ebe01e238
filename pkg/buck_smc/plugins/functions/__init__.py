from .metrics import Metrics, compute_metrics
from .dataset_fun import default_dataset_scenarios, generate_dataset
from .compare import (
    ComparisonReport,
    compare_controllers,
    default_experiments,
    event_rows,
    EVENT_HEADER,
    REPORT_HEADER,
)
from .ResultSerializer import ResultSerializer
from .TabulateFormatter import TabulateFormatter
from .DumpResults import DumpResults
from .SvgPlotter import SvgPlotter

__all__ = (
    "Metrics",
    "compute_metrics",
    "default_dataset_scenarios",
    "generate_dataset",
    "ComparisonReport",
    "compare_controllers",
    "default_experiments",
    "event_rows",
    "EVENT_HEADER",
    "REPORT_HEADER",
    "ResultSerializer",
    "TabulateFormatter",
    "DumpResults",
    "SvgPlotter",
)
