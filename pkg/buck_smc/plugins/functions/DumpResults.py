"""
DumpResults
###########

Function to take data and save it to the file.

Supported content types:

* ``csv`` - data is an iterable of rows, each row a dictionary or a sequence,
  ``headers`` give column order and header line; floats written with
  ``repr`` precision
* ``json`` - data serialized with sorted keys and 4 spaces indentation
* ``text`` - string saved as is, anything else formatted with ``pprint``

Parent directories are created if missing. Output is deterministic for
identical data.

DumpResults sample usage
========================

Save trace and report::

    from buck_smc.plugins.functions import DumpResults
    from buck_smc.plugins.runners.ScenarioRunner import TRACE_HEADER

    DumpResults(trace.rows(), "out/trace.csv", headers=TRACE_HEADER)
    DumpResults(report.rows, "out/report.csv", headers=REPORT_HEADER)
    DumpResults(ResultSerializer(report), "out/report.json", content_type="json")

DumpResults reference
=====================

.. autofunction:: buck_smc.plugins.functions.DumpResults.DumpResults
"""
import csv
import json
import logging
import os
import pprint

log = logging.getLogger(__name__)

CONTENT_TYPES = ("csv", "json", "text")


def _write_csv(f, results, headers) -> int:
    writer = csv.writer(f, lineterminator="\n")
    count = 0
    if headers:
        writer.writerow(headers)
    for row in results:
        if isinstance(row, dict):
            row = [row.get(h, "") for h in headers]
        writer.writerow([repr(i) if isinstance(i, float) else i for i in row])
        count += 1
    return count


def DumpResults(results, filename, headers=None, content_type="csv"):
    """
    Function to save results to local file system.

    :param results: (any) data to save
    :param filename: (str) OS path of the file to save results into
    :param headers: (list) CSV columns, required for rows given as dictionaries
    :param content_type: (str) ``csv``, ``json`` or ``text``
    :return: number of rows written for ``csv``, None otherwise
    """
    if content_type not in CONTENT_TYPES:
        raise ValueError(
            "buck-smc:DumpResults unsupported content_type '{}', supported - {}".format(
                content_type, ", ".join(CONTENT_TYPES)
            )
        )
    dirname = os.path.dirname(filename)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    ret = None
    with open(filename, mode="w", encoding="utf-8", newline="") as f:
        if content_type == "csv":
            ret = _write_csv(f, results, list(headers) if headers else None)
        elif content_type == "json":
            f.write(json.dumps(results, sort_keys=True, indent=4, separators=(",", ": ")))
            f.write("\n")
        else:
            if isinstance(results, str):
                result_to_save = results
            else:
                result_to_save = pprint.pformat(results, indent=2, width=150)
            f.write(result_to_save + "\n")
    log.debug("buck-smc:DumpResults saved {} results to '{}'".format(content_type, filename))
    return ret
