"""
SvgPlotter
##########

Function to draw line plots of trace signals as static SVG documents,
one polyline per series, built with ``xml.etree.ElementTree``. Coordinates
are formatted with fixed precision, so identical input gives identical file.

Long series are decimated to at most ``max_points`` points keeping every
n-th sample and the last one.

SvgPlotter sample usage
=======================

Plot output voltage of two controllers::

    from buck_smc.plugins.functions import SvgPlotter

    SvgPlotter(
        {
            "smc": (trace_smc.t, trace_smc.v_o),
            "dnn_smc": (trace_dnn.t, trace_dnn.v_o),
        },
        "out/startup_v_o.svg",
        title="startup",
        y_label="v_o, V",
    )

SvgPlotter reference
====================

.. autofunction:: buck_smc.plugins.functions.SvgPlotter.SvgPlotter
"""
import logging
import os
import xml.etree.ElementTree as ET

import numpy as np

log = logging.getLogger(__name__)

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd")
MARGIN = 50


def _decimate(x: np.ndarray, y: np.ndarray, max_points: int):
    if x.size <= max_points:
        return x, y
    step = int(np.ceil(x.size / max_points))
    idx = np.arange(0, x.size, step)
    if idx[-1] != x.size - 1:
        idx = np.append(idx, x.size - 1)
    return x[idx], y[idx]


def _span(low: float, high: float):
    if high - low > 0:
        return low, high
    return low - 0.5, high + 0.5


def SvgPlotter(
    series,
    filename,
    title="",
    x_label="t, s",
    y_label="",
    width=800,
    height=400,
    max_points=2000,
):
    """
    Save line plot to SVG file.

    :param series: (dict) series name to ``(x, y)`` arrays mapping
    :param filename: (str) OS path of SVG file
    :param title: (str) plot title
    :param x_label: (str) x axis label
    :param y_label: (str) y axis label
    :param width: (int) image width, px
    :param height: (int) image height, px
    :param max_points: (int) maximum number of points per polyline
    :return: ``xml.etree.ElementTree.Element`` SVG root
    """
    data = {}
    for name, (x, y) in series.items():
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError(
                "buck-smc:SvgPlotter series '{}' x and y lengths differ".format(name)
            )
        mask = np.isfinite(x) & np.isfinite(y)
        data[name] = _decimate(x[mask], y[mask], max_points)
    populated = [v for v in data.values() if v[0].size]
    if populated:
        x_min, x_max = _span(
            min(float(v[0].min()) for v in populated), max(float(v[0].max()) for v in populated)
        )
        y_min, y_max = _span(
            min(float(v[1].min()) for v in populated), max(float(v[1].max()) for v in populated)
        )
    else:
        x_min, x_max, y_min, y_max = 0.0, 1.0, 0.0, 1.0
    plot_w, plot_h = width - 2 * MARGIN, height - 2 * MARGIN

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width="{}px".format(width),
        height="{}px".format(height),
        viewBox="0 0 {} {}".format(width, height),
    )
    ET.SubElement(
        svg,
        "rect",
        x=str(MARGIN),
        y=str(MARGIN),
        width=str(plot_w),
        height=str(plot_h),
        fill="none",
        stroke="#000000",
    )
    for text, y_pos in ((title, MARGIN // 2), (x_label, height - 10)):
        ET.SubElement(
            svg, "text", x=str(width // 2), y=str(y_pos), **{"text-anchor": "middle"}
        ).text = text
    ET.SubElement(svg, "text", x="10", y=str(MARGIN - 10)).text = y_label
    for value, y_pos in ((y_max, MARGIN), (y_min, MARGIN + plot_h)):
        ET.SubElement(
            svg, "text", x="2", y=str(y_pos), **{"font-size": "10"}
        ).text = "{:.4g}".format(value)
    for value, x_pos in ((x_min, MARGIN), (x_max, MARGIN + plot_w)):
        ET.SubElement(
            svg, "text", x=str(x_pos), y=str(MARGIN + plot_h + 15), **{"font-size": "10"}
        ).text = "{:.4g}".format(value)

    group = ET.SubElement(svg, "g")
    for index, (name, (x, y)) in enumerate(data.items()):
        px = MARGIN + (x - x_min) / (x_max - x_min) * plot_w
        py = MARGIN + plot_h - (y - y_min) / (y_max - y_min) * plot_h
        points = " ".join("{:.3f},{:.3f}".format(a, b) for a, b in zip(px, py))
        color = COLORS[index % len(COLORS)]
        line = ET.SubElement(
            group,
            "polyline",
            points=points,
            fill="none",
            stroke=color,
            **{"stroke-width": "1"}
        )
        line.set("data-series", str(name))
        ET.SubElement(
            svg,
            "text",
            x=str(MARGIN + 10),
            y=str(MARGIN + 15 + 15 * index),
            fill=color,
            **{"font-size": "12"}
        ).text = str(name)

    dirname = os.path.dirname(filename)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    ET.ElementTree(svg).write(filename, encoding="utf-8", xml_declaration=True)
    log.debug("buck-smc:SvgPlotter saved plot to '{}'".format(filename))
    return svg
