"""
run_config
##########

Run configuration - converter, controllers, scenario, training, dataset and
comparison parameters - loaded from JSON or YAML document.

Built-in defaults are deep merged with the document, then command line
overrides are merged on top; precedence is defaults < file < flags. Merged
document validated using Cerberus schema, unknown keys are rejected, each
error reported as ``buck-smc:config '<section.key>' <constraint>``.

Sample YAML document::

    seed: 1
    num_workers: 2
    converter:
      load_resistance_ohm: 10
      input_voltage_volt: 12
    smc:
      surface_slope_c: 500
    scenario:
      duration_s: 0.06
      events:
        - {time_s: 0.03, kind: load_step, new_value: 2}
    train:
      optimizer: sgd
      activation: relu
      epochs: 260

run_config sample usage
=======================

Load configuration and build objects::

    from buck_smc.utils.run_config import load_run_config

    cfg = load_run_config("run.yaml", overrides={"seed": 3})
    params = cfg.converter_params()
    scenario = cfg.scenario()

run_config reference
====================

.. autoclass:: buck_smc.utils.run_config.RunConfig
   :members:
.. autofunction:: buck_smc.utils.run_config.load_run_config
"""
import copy
import json
import logging
import os

from typing import Any, Dict, List

from ..plugins.controllers.smc import SmcConfig
from ..plugins.functions.compare import default_experiments
from ..plugins.functions.dataset_fun import default_dataset_scenarios
from ..plugins.models.plant import ConverterParams, Disturbance
from ..plugins.neural.trainer import TrainConfig
from ..plugins.runners.ScenarioRunner import Event, Scenario

log = logging.getLogger(__name__)

try:
    import yaml

    HAS_YAML = True
    PARSE_ERRORS = (ValueError, yaml.YAMLError)
except ImportError:
    log.debug("Failed to import yaml library, install: pip install pyyaml")
    HAS_YAML = False
    PARSE_ERRORS = (ValueError,)

try:
    from cerberus import Validator

    HAS_CERBERUS = True
except ImportError:
    log.debug("Failed to import Cerberus library, install: pip install cerberus")
    HAS_CERBERUS = False


DEFAULTS = {
    "seed": 0,
    "num_workers": 1,
    "converter": {
        "inductance_henry": 160e-6,
        "capacitance_farad": 200e-6,
        "load_resistance_ohm": 10.0,
        "input_voltage_volt": 12.0,
        "reference_voltage_volt": 5.0,
        "switching_frequency_hz": 25000.0,
    },
    "smc": {
        "surface_slope_c": 500.0,
        "switching_gain_eta": 3e7,
        "boundary_layer_phi": 0.0,
        "disturbance_bound_T": 0.0,
    },
    "dnn_smc": {
        "gain_gamma": 1e3,
        "approx_error_bound": 0.0,
        "w_max_ratio": 10.0,
        "freeze_adaptation": False,
        "cold_start": False,
    },
    "scenario": {
        "duration_s": 0.06,
        "dt_s": 1e-6,
        "model": "averaged",
        "substeps": 100,
        "events": [],
        "disturbance": {
            "kind": "none",
            "magnitude": 0.0,
            "start_time_s": 0.0,
            "bound_T": 0.0,
            "frequency_hz": 1000.0,
        },
    },
    "train": {
        "optimizer": "sgd",
        "activation": "relu",
        "learning_rate": None,
        "epochs": 260,
        "sweep_epochs": 50,
        "layer_sizes": [2, 3, 3, 1],
    },
    "dataset": {
        "load_resistances": [2.0, 5.0, 10.0],
        "input_voltages": [10.0, 12.0, 14.0],
        "duration_s": 0.04,
        "load_step_time_s": 0.02,
        "surface_slopes": [500.0, 1000.0],
        "stride_periods": 1,
        "skip_s": 2e-4,
    },
    "compare": {
        "duration_s": 0.06,
        "event_time_s": 0.03,
        "load_step_ohm": 2.0,
        "vin_step_volt": 13.0,
    },
    "paths": {
        "model": "model.json",
        "dataset": "dataset.csv",
        "history": None,
        "out": "out",
    },
}


def _positive(field, value, error):
    if value is not None and not value > 0:
        error(field, "must be strictly positive")


def _number(**kwargs) -> dict:
    return {"type": "number", **kwargs}


def _positive_number(**kwargs) -> dict:
    return {"type": "number", "check_with": _positive, **kwargs}


def _dict(schema: dict) -> dict:
    return {"type": "dict", "schema": schema}


def _positive_list() -> dict:
    return {"type": "list", "minlength": 1, "schema": _positive_number()}


SMC_SCHEMA = {
    "surface_slope_c": _positive_number(),
    "switching_gain_eta": _number(min=0),
    "boundary_layer_phi": _number(min=0),
    "disturbance_bound_T": _number(min=0),
}

SCHEMA = {
    "seed": {"type": "integer", "min": 0},
    "num_workers": {"type": "integer", "min": 1},
    "converter": _dict({k: _positive_number() for k in DEFAULTS["converter"]}),
    "smc": _dict(SMC_SCHEMA),
    "dnn_smc": _dict(
        {
            "gain_gamma": _number(min=0),
            "approx_error_bound": _number(min=0),
            "w_max_ratio": _number(min=0, nullable=True),
            "freeze_adaptation": {"type": "boolean"},
            "cold_start": {"type": "boolean"},
        }
    ),
    "scenario": _dict(
        {
            "duration_s": _number(min=0),
            "dt_s": _positive_number(),
            "model": {"type": "string", "allowed": ["averaged", "switched"]},
            "substeps": {"type": "integer", "min": 1},
            "events": {
                "type": "list",
                "schema": _dict(
                    {
                        "time_s": _number(min=0, required=True),
                        "kind": {
                            "type": "string",
                            "allowed": ["load_step", "vin_step"],
                            "required": True,
                        },
                        "new_value": _positive_number(required=True),
                    }
                ),
            },
            "disturbance": _dict(
                {
                    "kind": {
                        "type": "string",
                        "allowed": ["none", "additive_step", "additive_sine"],
                    },
                    "magnitude": _number(),
                    "start_time_s": _number(min=0),
                    "bound_T": _number(min=0),
                    "frequency_hz": _positive_number(),
                }
            ),
        }
    ),
    "train": _dict(
        {
            "optimizer": {"type": "string", "allowed": ["sgd", "adam", "rmsprop"]},
            "activation": {"type": "string", "allowed": ["relu", "sigmoid", "tanh"]},
            "learning_rate": _number(min=0, nullable=True),
            "epochs": {"type": "integer", "min": 1},
            "sweep_epochs": {"type": "integer", "min": 1},
            "layer_sizes": {
                "type": "list",
                "minlength": 3,
                "schema": {"type": "integer", "min": 1},
            },
        }
    ),
    "dataset": _dict(
        {
            "load_resistances": _positive_list(),
            "input_voltages": _positive_list(),
            "duration_s": _positive_number(),
            "load_step_time_s": _number(min=0),
            "surface_slopes": _positive_list(),
            "stride_periods": {"type": "integer", "min": 1},
            "skip_s": _number(min=0),
        }
    ),
    "compare": _dict(
        {
            "duration_s": _positive_number(),
            "event_time_s": _number(min=0),
            "load_step_ohm": _positive_number(),
            "vin_step_volt": _positive_number(),
        }
    ),
    "paths": _dict(
        {
            "model": {"type": "string", "nullable": True},
            "dataset": {"type": "string", "nullable": True},
            "history": {"type": "string", "nullable": True},
            "out": {"type": "string", "nullable": True},
        }
    ),
}


def merge_dict(base: dict, update: dict) -> dict:
    """Recursively merge ``update`` into copy of ``base``, lists are replaced."""
    ret = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(ret.get(key), dict):
            ret[key] = merge_dict(ret[key], value)
        else:
            ret[key] = copy.deepcopy(value)
    return ret


def _flatten_errors(errors: Any, path: List[str], ret: List[str]) -> List[str]:
    if isinstance(errors, dict):
        for key, value in errors.items():
            _flatten_errors(value, path + [str(key)], ret)
    elif isinstance(errors, list):
        for item in errors:
            _flatten_errors(item, path, ret)
    else:
        ret.append("buck-smc:config '{}' {}".format(".".join(path), errors))
    return ret


def validate_config(data: dict) -> dict:
    """Validate merged configuration document, raise ValueError on errors."""
    if not HAS_CERBERUS:
        raise ValueError(
            "buck-smc:config failed import Cerberus library, install: pip install cerberus"
        )
    validator = Validator(SCHEMA, allow_unknown=False)
    if not validator.validate(data):
        messages = _flatten_errors(validator.errors, [], [])
        raise ValueError("; ".join(sorted(messages)))
    return data


def load_document(filename: str) -> dict:
    """Load JSON or YAML configuration document into dictionary."""
    if not os.path.exists(filename):
        raise FileNotFoundError("buck-smc:config file '{}' not found".format(filename))
    with open(filename, "r", encoding="utf-8") as f:
        content = f.read()
    try:
        if filename.endswith((".yaml", ".yml")):
            if not HAS_YAML:
                raise ValueError(
                    "buck-smc:config failed import yaml library, install: pip install pyyaml"
                )
            data = yaml.safe_load(content)
        else:
            data = json.loads(content)
    except PARSE_ERRORS as e:
        raise ValueError("buck-smc:config failed to parse '{}': {}".format(filename, e))
    data = data or {}
    if not isinstance(data, dict):
        raise ValueError(
            "buck-smc:config '{}' top level must be a mapping, got '{}'".format(
                filename, type(data).__name__
            )
        )
    return data


def _get_smc_config(data: Dict[str, Any]) -> SmcConfig:
    return SmcConfig(
        surface_slope_c=data["surface_slope_c"],
        switching_gain_eta=data["switching_gain_eta"],
        boundary_layer_phi=data["boundary_layer_phi"],
        disturbance_bound_T=data["disturbance_bound_T"],
    )


class RunConfig:
    """
    Validated configuration with builders for library objects.

    :param data: (dict) merged and validated configuration document
    """

    def __init__(self, data: dict) -> None:
        self.data = data
        # cross-field checks
        try:
            self.converter_params()
            self.scenario()
        except TypeError as e:
            raise ValueError("buck-smc:config invalid parameters: {}".format(e))

    def __getitem__(self, key: str) -> Any:
        return self.data[key]

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def num_workers(self) -> int:
        return self.data["num_workers"]

    def converter_params(self) -> ConverterParams:
        return ConverterParams(**{k: float(v) for k, v in self.data["converter"].items()})

    def smc_config(self) -> SmcConfig:
        return _get_smc_config(self.data["smc"])

    def dnn_smc_kwargs(self) -> dict:
        """
        Keyword arguments for ``DnnSmc`` besides params and network, sliding
        surface and gains come from the ``smc`` section shared with classic SMC.
        """
        data = self.data["dnn_smc"]
        return {
            "cfg": self.smc_config(),
            "gain_gamma": data["gain_gamma"],
            "approx_error_bound": data["approx_error_bound"],
            "w_max_ratio": data["w_max_ratio"],
            "freeze_adaptation": data["freeze_adaptation"],
            "cold_start": data["cold_start"],
        }

    def disturbance(self) -> Disturbance:
        return Disturbance(**self.data["scenario"]["disturbance"])

    def scenario(self) -> Scenario:
        data = self.data["scenario"]
        return Scenario(
            params=self.converter_params(),
            duration_s=data["duration_s"],
            dt_s=data["dt_s"],
            model=data["model"],
            substeps=data["substeps"],
            events=[Event(e["time_s"], e["kind"], e["new_value"]) for e in data["events"]],
            additive_disturbance=self.disturbance(),
            seed=self.seed,
        )

    def train_config(self, sweep: bool = False) -> TrainConfig:
        data = self.data["train"]
        return TrainConfig(
            optimizer=data["optimizer"],
            activation=data["activation"],
            learning_rate=data["learning_rate"],
            epochs=data["sweep_epochs"] if sweep else data["epochs"],
            seed=self.seed,
            layer_sizes=tuple(data["layer_sizes"]),
        )

    def dataset_scenarios(self) -> List[Scenario]:
        data = self.data["dataset"]
        return default_dataset_scenarios(
            params=self.converter_params(),
            load_resistances=data["load_resistances"],
            input_voltages=data["input_voltages"],
            duration_s=data["duration_s"],
            load_step_time_s=data["load_step_time_s"],
            dt_s=self.data["scenario"]["dt_s"],
            seed=self.seed,
        )

    def experiments(self) -> Dict[str, Scenario]:
        data = self.data["compare"]
        return default_experiments(
            params=self.converter_params(),
            duration_s=data["duration_s"],
            event_time_s=data["event_time_s"],
            dt_s=self.data["scenario"]["dt_s"],
            load_step_ohm=data["load_step_ohm"],
            vin_step_volt=data["vin_step_volt"],
            seed=self.seed,
        )


def load_run_config(filename: str = None, overrides: dict = None) -> RunConfig:
    """
    Load run configuration.

    :param filename: (str) JSON or YAML document path, defaults only if None
    :param overrides: (dict) nested dictionary merged on top of the document
    :return: RunConfig object
    """
    data = load_document(filename) if filename else {}
    merged = merge_dict(merge_dict(DEFAULTS, data), overrides or {})
    return RunConfig(validate_config(merged))
