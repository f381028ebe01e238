"""
ResultSerializer
################

Helper function to transform comparison report or metrics in python
dictionary or list to ease programmatic consumption or further
transformation in other formats such as JSON, CSV or text tables.

ResultSerializer Sample Usage
=============================

Code to demonstrate how to invoke ResultSerializer::

    from buck_smc.plugins.functions import ResultSerializer, compare_controllers

    report = compare_controllers(experiments, controllers)
    result_dictionary = ResultSerializer(report, add_details=True)

ResultSerializer returns
========================

If ``add_details`` is False and ``to_dict`` is True returns dictionary keyed
by controller and experiment names::

    {
        "smc": {
            "startup": {"settling_ms": 7.9, "overshoot_v": 0.0, ...},
            "load_step": {...},
        },
        "dnn_smc": {...},
    }

If ``add_details`` is True, every metrics dictionary also contains
``settled``, startup overshoot and per event overshoot, voltage and current
recovery lists, times in seconds.

If ``to_dict`` is False returns list of report rows, ratio rows included::

    [
        {"controller": "smc", "experiment": "startup", "settling_ms": 7.9, ...},
        ...
        {"controller": "ratio", "experiment": "startup", "settling_ms": 0.5, ...},
    ]

Items not supported are returned as is.

ResultSerializer reference
==========================

.. autofunction:: buck_smc.plugins.functions.ResultSerializer.ResultSerializer
"""
import logging

from .compare import ComparisonReport
from .metrics import Metrics

log = logging.getLogger(__name__)


def _serialize_metrics(metrics: Metrics, add_details: bool, skip: list) -> dict:
    ret = metrics.report_row()
    if add_details:
        ret.update(metrics.to_dict())
    return {k: v for k, v in ret.items() if k not in skip}


def ResultSerializer(report, add_details=False, to_dict=True, skip=None):
    """
    :param report: ``ComparisonReport`` or ``Metrics`` object
    :param add_details: boolean to indicate if results should contain more info, default
        is False
    :param to_dict: (bool) default is True, forms nested dictionary structure, if False
        forms results in a list.
    :param skip: (list) list of metrics names to omit
    """
    skip = skip or []
    if isinstance(report, Metrics):
        return _serialize_metrics(report, add_details, skip)
    # run check
    if not isinstance(report, ComparisonReport):
        return report

    # form nested dictionary structure
    if to_dict:
        ret = {}
        for controller_name, experiments in report.metrics.items():
            for experiment, metrics in experiments.items():
                ret.setdefault(controller_name, {})[experiment] = _serialize_metrics(
                    metrics, add_details, skip
                )
    # form plain list of results
    else:
        ret = []
        for row in report.rows:
            item = {k: v for k, v in row.items() if k not in skip}
            if add_details and row["controller"] in report.metrics:
                details = report.metrics[row["controller"]][row["experiment"]].to_dict()
                item.update({k: v for k, v in details.items() if k not in skip})
            ret.append(item)
    return ret
