import sys
import json
import logging
import pytest

sys.path.insert(0, "..")

from buck_smc.utils import run_config
from buck_smc.utils.run_config import DEFAULTS, RunConfig, load_run_config, merge_dict

logging.basicConfig(level=logging.ERROR)

run_config_yaml = """
seed: 3
num_workers: 2
converter:
  load_resistance_ohm: 5
smc:
  surface_slope_c: 800
scenario:
  duration_s: 0.02
  model: switched
  events:
    - {time_s: 0.01, kind: load_step, new_value: 2}
train:
  optimizer: adam
  activation: tanh
  epochs: 10
"""


def test_defaults():
    cfg = load_run_config()
    assert cfg.seed == 0
    assert cfg.num_workers == 1
    params = cfg.converter_params()
    assert params.load_resistance_ohm == 10.0
    assert params.switching_period_s == pytest.approx(40e-6)
    assert cfg.smc_config().surface_slope_c == 500.0
    kwargs = cfg.dnn_smc_kwargs()
    assert kwargs["gain_gamma"] == 1e3
    assert kwargs["cfg"] == cfg.smc_config()
    scn = cfg.scenario()
    assert scn.duration_s == 0.06 and scn.events == ()
    assert cfg.train_config().epochs == 260
    assert cfg.train_config(sweep=True).epochs == 50
    assert len(cfg.dataset_scenarios()) == 9
    assert list(cfg.experiments()) == ["startup", "load_step", "vin_step"]
    assert cfg["paths"]["model"] == "model.json"


# test_defaults()


def test_load_yaml(tmp_path):
    filename = tmp_path / "run.yaml"
    filename.write_text(run_config_yaml)
    cfg = load_run_config(str(filename))
    assert cfg.seed == 3
    assert cfg.num_workers == 2
    assert cfg.converter_params().load_resistance_ohm == 5.0
    # untouched keys keep defaults
    assert cfg.converter_params().input_voltage_volt == 12.0
    assert cfg.smc_config().surface_slope_c == 800
    scn = cfg.scenario()
    assert scn.model == "switched"
    assert scn.events[0].kind == "load_step"
    assert scn.seed == 3
    train_cfg = cfg.train_config()
    assert (train_cfg.optimizer, train_cfg.activation, train_cfg.epochs) == ("adam", "tanh", 10)
    assert train_cfg.seed == 3


# test_load_yaml()


def test_load_json_and_overrides(tmp_path):
    filename = tmp_path / "run.json"
    filename.write_text(json.dumps({"seed": 1, "train": {"epochs": 5}}))
    cfg = load_run_config(str(filename), overrides={"seed": 7, "paths": {"model": "m.json"}})
    assert cfg.seed == 7
    assert cfg.train_config().epochs == 5
    assert cfg["paths"]["model"] == "m.json"
    assert cfg["paths"]["dataset"] == "dataset.csv"


# test_load_json_and_overrides()


def test_validation_errors():
    with pytest.raises(ValueError, match="'converter.inductance_henry' must be strictly positive"):
        load_run_config(overrides={"converter": {"inductance_henry": 0}})
    with pytest.raises(ValueError, match="'train.optimizer' unallowed value"):
        load_run_config(overrides={"train": {"optimizer": "lbfgs"}})
    with pytest.raises(ValueError, match="'smc.gain' unknown field"):
        load_run_config(overrides={"smc": {"gain": 1}})
    with pytest.raises(ValueError, match="'dnn_smc.surface_slope_c' unknown field"):
        load_run_config(overrides={"dnn_smc": {"surface_slope_c": 1000}})
    with pytest.raises(ValueError, match="'seed' min value is 0"):
        load_run_config(overrides={"seed": -1})
    with pytest.raises(ValueError, match="step down"):
        load_run_config(overrides={"converter": {"reference_voltage_volt": 20}})
    with pytest.raises(ValueError, match="strictly increasing"):
        load_run_config(
            overrides={
                "scenario": {
                    "events": [
                        {"time_s": 0.02, "kind": "load_step", "new_value": 2},
                        {"time_s": 0.01, "kind": "load_step", "new_value": 5},
                    ]
                }
            }
        )


# test_validation_errors()


def test_document_errors(tmp_path):
    with pytest.raises(FileNotFoundError, match="not found"):
        load_run_config(str(tmp_path / "missing.yaml"))
    broken = tmp_path / "broken.json"
    broken.write_text("{seed: ")
    with pytest.raises(ValueError, match="failed to parse"):
        load_run_config(str(broken))
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ValueError, match="top level must be a mapping"):
        load_run_config(str(listing))
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_run_config(str(empty)).seed == 0


# test_document_errors()


def test_merge_dict():
    base = {"a": {"b": 1, "c": [1, 2]}, "d": 1}
    ret = merge_dict(base, {"a": {"c": [3]}, "e": 2})
    assert ret == {"a": {"b": 1, "c": [3]}, "d": 1, "e": 2}
    assert base == {"a": {"b": 1, "c": [1, 2]}, "d": 1}
    assert merge_dict(DEFAULTS, None) == DEFAULTS
    assert merge_dict(DEFAULTS, None) is not DEFAULTS


# test_merge_dict()


def test_dnn_smc_shares_smc_section():
    cfg = load_run_config(
        overrides={"smc": {"surface_slope_c": 800}, "dnn_smc": {"gain_gamma": 50}}
    )
    kwargs = cfg.dnn_smc_kwargs()
    assert kwargs["cfg"].surface_slope_c == 800
    assert kwargs["cfg"] == cfg.smc_config()
    assert kwargs["gain_gamma"] == 50


# test_dnn_smc_shares_smc_section()


def test_missing_cerberus_is_config_error(monkeypatch):
    monkeypatch.setattr(run_config, "HAS_CERBERUS", False)
    with pytest.raises(ValueError, match="failed import Cerberus"):
        load_run_config(overrides={"smc": {"eta": 1}})


# test_missing_cerberus_is_config_error()


def test_unknown_builder_argument_is_config_error():
    data = merge_dict(DEFAULTS, {"converter": {"inductanse_henry": 1e-4}})
    with pytest.raises(ValueError, match="invalid parameters"):
        RunConfig(data)
    with pytest.raises(ValueError, match="'converter.inductanse_henry' unknown field"):
        load_run_config(overrides={"converter": {"inductanse_henry": 1e-4}})


# test_unknown_builder_argument_is_config_error()
