import sys
import json
import math
import logging
import xml.etree.ElementTree as ET
import pytest
import numpy as np

sys.path.insert(0, "..")

from buck_smc.plugins.functions.metrics import Metrics
from buck_smc.plugins.functions.compare import REPORT_HEADER, ComparisonReport
from buck_smc.plugins.functions.ResultSerializer import ResultSerializer
from buck_smc.plugins.functions.DumpResults import DumpResults
from buck_smc.plugins.functions.SvgPlotter import SvgPlotter

logging.basicConfig(level=logging.ERROR)

SVG = "{http://www.w3.org/2000/svg}"


def make_report():
    smc = Metrics(0.0079, True, 0.03, math.nan, 0.001, 0.03, event_recovery_s=[math.nan])
    dnn = Metrics(0.0041, True, 0.015, 0.0009, 0.001, 0.015, event_recovery_s=[0.0009])
    rows = [
        {"controller": "smc", "experiment": "vin_step", **smc.report_row()},
        {"controller": "dnn_smc", "experiment": "vin_step", **dnn.report_row()},
        {"controller": "ratio", "experiment": "vin_step", **dict.fromkeys(REPORT_HEADER[2:], 1.0)},
    ]
    return ComparisonReport(
        rows=rows,
        metrics={"smc": {"vin_step": smc}, "dnn_smc": {"vin_step": dnn}},
        traces={},
        experiments={},
    )


def test_result_serializer_metrics():
    metrics = Metrics(0.0079, True, 0.03, 0.0, 0.001, 0.03)
    ret = ResultSerializer(metrics)
    assert list(ret) == list(REPORT_HEADER[2:])
    assert ret["settling_ms"] == pytest.approx(7.9)
    detailed = ResultSerializer(metrics, add_details=True, skip=["ripple_pp_v"])
    assert detailed["settled"] is True
    assert detailed["settling_time_s"] == 0.0079
    assert "ripple_pp_v" not in detailed
    assert detailed["event_recovery_s"] == []


# test_result_serializer_metrics()


def test_result_serializer_report_to_dict():
    ret = ResultSerializer(make_report())
    assert list(ret) == ["smc", "dnn_smc"]
    assert list(ret["smc"]) == ["vin_step"]
    assert math.isnan(ret["smc"]["vin_step"]["recovery_ms"])
    assert ret["dnn_smc"]["vin_step"]["recovery_ms"] == pytest.approx(0.9)
    assert "ratio" not in ret


# test_result_serializer_report_to_dict()


def test_result_serializer_report_to_list():
    ret = ResultSerializer(make_report(), to_dict=False, skip=["ss_error_v"])
    assert [r["controller"] for r in ret] == ["smc", "dnn_smc", "ratio"]
    assert all("ss_error_v" not in r for r in ret)
    detailed = ResultSerializer(make_report(), to_dict=False, add_details=True)
    assert detailed[1]["event_recovery_s"] == [0.0009]
    assert "event_recovery_s" not in detailed[2]


# test_result_serializer_report_to_list()


def test_result_serializer_unsupported():
    assert ResultSerializer("text") == "text"
    assert ResultSerializer([1, 2]) == [1, 2]


# test_result_serializer_unsupported()


def test_dump_results_csv(tmp_path):
    filename = str(tmp_path / "out" / "report.csv")
    count = DumpResults(make_report().rows, filename, headers=REPORT_HEADER)
    assert count == 3
    with open(filename, encoding="utf-8") as f:
        lines = f.read().splitlines()
    assert lines[0] == ",".join(REPORT_HEADER)
    assert lines[1].startswith("smc,vin_step,")
    assert ",nan," in lines[1]
    assert lines[3] == "ratio,vin_step,1.0,1.0,1.0,1.0,1.0"


# test_dump_results_csv()


def test_dump_results_csv_float_precision(tmp_path):
    filename = str(tmp_path / "trace.csv")
    rows = [(0.1, 1e-05, 1, "x"), (1 / 3, -0.0, 2, "y")]
    DumpResults(rows, filename, headers=("a", "b", "c", "d"))
    with open(filename, encoding="utf-8") as f:
        content = f.read()
    assert content == "a,b,c,d\n0.1,1e-05,1,x\n0.3333333333333333,-0.0,2,y\n"
    # no header line
    assert DumpResults([[1, 2]], filename) == 1
    with open(filename, encoding="utf-8") as f:
        assert f.read() == "1,2\n"


# test_dump_results_csv_float_precision()


def test_dump_results_json_and_text(tmp_path):
    filename = str(tmp_path / "report.json")
    DumpResults({"b": 1, "a": [1.5, 2]}, filename, content_type="json")
    with open(filename, encoding="utf-8") as f:
        content = f.read()
    assert content.index('"a"') < content.index('"b"')
    assert json.loads(content) == {"a": [1.5, 2], "b": 1}
    filename = str(tmp_path / "note.txt")
    DumpResults("hello", filename, content_type="text")
    with open(filename, encoding="utf-8") as f:
        assert f.read() == "hello\n"
    DumpResults({"k": 1}, filename, content_type="text")
    with open(filename, encoding="utf-8") as f:
        assert f.read() == "{'k': 1}\n"
    with pytest.raises(ValueError, match="unsupported content_type"):
        DumpResults("x", filename, content_type="xlsx")


# test_dump_results_json_and_text()


def test_svg_plotter(tmp_path):
    t = np.linspace(0.0, 0.01, 5000)
    filename = str(tmp_path / "plots" / "startup_v_o.svg")
    svg = SvgPlotter(
        {"smc": (t, 5.0 * (1 - np.exp(-500 * t))), "dnn_smc": (t, 5.0 * (1 - np.exp(-1000 * t)))},
        filename,
        title="startup",
        y_label="v_o, V",
        max_points=1000,
    )
    root = ET.parse(filename).getroot()
    assert root.tag == SVG + "svg"
    lines = root.findall(".//{}polyline".format(SVG))
    assert [line.get("data-series") for line in lines] == ["smc", "dnn_smc"]
    for line in lines:
        points = line.get("points").split()
        assert len(points) <= 1001
        x_last, y_last = (float(i) for i in points[-1].split(","))
        assert x_last == pytest.approx(750.0)
    assert "startup" in [i.text for i in root.iter(SVG + "text")]
    assert svg.tag == "svg"


# test_svg_plotter()


def test_svg_plotter_is_deterministic(tmp_path):
    t = np.linspace(0.0, 1.0, 300)
    series = {"a": (t, np.sin(t)), "b": (t, np.full(300, math.nan))}
    first, second = str(tmp_path / "1.svg"), str(tmp_path / "2.svg")
    SvgPlotter(series, first)
    SvgPlotter(series, second)
    with open(first, "rb") as f1, open(second, "rb") as f2:
        assert f1.read() == f2.read()
    # flat series still produces a plot
    SvgPlotter({"flat": ([0.0, 1.0], [2.0, 2.0])}, first)
    with pytest.raises(ValueError, match="lengths differ"):
        SvgPlotter({"bad": ([0.0, 1.0], [1.0])}, first)


# test_svg_plotter_is_deterministic()
