"""
TabulateFormatter
#################

Function to transform results in a text table format using Tabulate module.

TabulateFormatter works with a list of dictionaries to represent them as a table,
if ``ComparisonReport`` object passed on to TabulateFormatter it uses
ResultSerializer function to serialize report into a list of dictionaries.

Dependencies:

* `Tabulate module <https://pypi.org/project/tabulate/>`_ for results table formatting

Sample code to use TabulateFormatter::

    from buck_smc.plugins.functions import TabulateFormatter, compare_controllers

    report = compare_controllers(experiments, controllers)

    print(TabulateFormatter(report, tabulate="brief"))
    # prints:
    # +----+--------------+--------------+---------------+---------------+ ...
    # |    | controller   | experiment   |   settling_ms |   overshoot_v | ...
    # +====+==============+==============+===============+===============+ ...
    # |  0 | smc          | startup      |       7.91    |   0           | ...

Reference
=========

.. autofunction:: buck_smc.plugins.functions.TabulateFormatter.TabulateFormatter
"""
import logging

from .compare import ComparisonReport, REPORT_HEADER
from .ResultSerializer import ResultSerializer

log = logging.getLogger(__name__)

try:
    import tabulate as tabulate_lib

    HAS_TABULATE = True
except ImportError:
    HAS_TABULATE = False
    log.debug("Failed to import tabulate library, install: pip install tabulate")

# named styles, headers default to report columns
STYLES = {
    "brief": {"tablefmt": "grid", "showindex": True},
    "terse": {"tablefmt": "simple", "showindex": True},
}


def _split(value) -> list:
    if isinstance(value, str):
        return [i.strip() for i in value.split(",") if i.strip()]
    return list(value or [])


def _tabulate_kwargs(tabulate, headers) -> dict:
    if tabulate is True:
        return {"headers": headers}
    if isinstance(tabulate, dict):
        return {"headers": headers, **tabulate}
    if isinstance(tabulate, str) and tabulate in STYLES:
        return {
            **STYLES[tabulate],
            "headers": list(REPORT_HEADER) if headers == "keys" else headers,
        }
    return None


def TabulateFormatter(
    result,
    tabulate=True,
    headers="keys",
    headers_exclude=None,
    sortby=None,
    reverse=False,
):
    """
    Function to format results in a text table.

    :param result: list of dictionaries or ``ComparisonReport`` object
    :param tabulate: (dict or str or bool) controls tabulate behavior
    :param headers: (list or str) list of table headers, comma-separated string of
        headers or one of tabulate supported values, e.g. ``keys``
    :param headers_exclude: (list or str) table headers to exclude
    :param sortby: (str) name of the key to sort rows by, no sorting by default
    :param reverse: (bool) reverses sort order if True, default is False

    Supported values for ``tabulate`` attribute:

    * ``brief`` - ``grid`` table with index column, headers are report columns
    * ``terse`` - ``simple`` table with index column, headers are report columns
    * ``True`` - uses ``headers``, no other formatting
    * ``False`` - does nothing, returns serialized rows
    * ``dictionary`` - passed as ``**kwargs`` to ``tabulate.tabulate`` method
    """
    if isinstance(result, ComparisonReport):
        rows = ResultSerializer(result, to_dict=False)
    elif isinstance(result, list):
        rows = result
    else:
        log.error(
            "buck-smc:TabulateFormatter unsupported results type '{}', "
            "supported - list or ComparisonReport".format(type(result))
        )
        return result
    if tabulate is False:
        return rows
    if not HAS_TABULATE:
        log.error(
            "buck-smc:TabulateFormatter failed import tabulate library, "
            "install: pip install tabulate"
        )
        return rows

    if isinstance(headers, str) and "," in headers:
        headers = _split(headers)
    kwargs = _tabulate_kwargs(tabulate, headers)
    if kwargs is None:
        log.error(
            "buck-smc:TabulateFormatter unsupported tabulate value '{}', "
            "supported - {}, bool or dict".format(tabulate, ", ".join(STYLES))
        )
        return rows

    if sortby:
        rows = sorted(rows, key=lambda row: str(row.get(sortby, "")), reverse=reverse)

    exclude = set(_split(headers_exclude))
    if exclude:
        rows = [{k: v for k, v in row.items() if k not in exclude} for row in rows]
        if isinstance(kwargs["headers"], list):
            kwargs["headers"] = [h for h in kwargs["headers"] if h not in exclude]

    # explicit headers select and order columns
    if isinstance(kwargs["headers"], list):
        rows = [[row.get(h, "") for h in kwargs["headers"]] for row in rows]

    return tabulate_lib.tabulate(rows, **kwargs)
