"""
cli
###

``buck-smc`` command line tool with sub-commands:

* ``simulate`` - run configured scenario, save trace CSV, print metrics
* ``dataset`` - generate training dataset CSV over the operating grid
* ``train`` - train network on dataset, save model JSON and history CSV
* ``sweep`` - optimizer by activation RMSE table
* ``compare`` - classic versus adaptive neural controller report, per event
  recovery CSV and plots, both controllers on the ``smc`` section gains

Configuration precedence is built-in defaults < ``--config`` file <
command line flags. Exit status is 0 on success, 1 on usage or
configuration errors, 2 on runtime failures such as plant blow-up or
training divergence.

cli sample usage
================

Typical workflow::

    buck-smc dataset --out dataset.csv
    buck-smc train --dataset dataset.csv --model model.json
    buck-smc simulate --controller dnn --model model.json --out out/trace.csv --svg
    buck-smc compare --model model.json --out out/report.csv --svg

cli reference
=============

.. autofunction:: buck_smc.cli.main
"""
import argparse
import logging
import os
import sys

from .plugins.controllers.adaptive_smc import DnnSmc
from .plugins.controllers.open_loop import OpenLoopDuty
from .plugins.controllers.smc import ClassicSmc
from .plugins.functions.compare import (
    EVENT_HEADER,
    REPORT_HEADER,
    compare_controllers,
    event_rows,
)
from .plugins.functions.dataset_fun import generate_dataset
from .plugins.functions.DumpResults import DumpResults
from .plugins.functions.metrics import compute_metrics
from .plugins.functions.ResultSerializer import ResultSerializer
from .plugins.functions.SvgPlotter import SvgPlotter
from .plugins.functions.TabulateFormatter import TabulateFormatter
from .plugins.neural.dataset import load_dataset, save_dataset
from .plugins.neural.mlp import correlation, init_mlp, load_model, predict, save_model
from .plugins.neural.trainer import evaluate, hyperparameter_sweep, train
from .plugins.runners.ScenarioRunner import TRACE_HEADER, run_scenario
from .utils.run_config import load_run_config

log = logging.getLogger(__name__)

HISTORY_HEADER = ("epoch", "cost", "rmse")
SWEEP_HEADER = ("optimizer", "activation", "rmse", "best")


class ArgumentParser(argparse.ArgumentParser):
    """Exit with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "buck-smc: {}\n".format(message))


def _stem(path: str) -> str:
    return os.path.splitext(path)[0]


def _overrides(args) -> dict:
    ret = {"train": {}, "paths": {}}
    if getattr(args, "seed", None) is not None:
        ret["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        ret["num_workers"] = args.workers
    if getattr(args, "epochs", None) is not None:
        key = "sweep_epochs" if args.command == "sweep" else "epochs"
        ret["train"][key] = args.epochs
    for name in ("optimizer", "activation", "learning_rate"):
        if getattr(args, name, None) is not None:
            ret["train"][name] = getattr(args, name)
    for name in ("model", "dataset", "history"):
        if getattr(args, name, None) is not None:
            ret["paths"][name] = getattr(args, name)
    return ret


def _plot_traces(traces: dict, stem: str, title: str) -> list:
    files = []
    for signal, label in (("v_o", "v_o, V"), ("i_l", "i_L, A")):
        filename = "{}_{}.svg".format(stem, signal)
        SvgPlotter(
            {name: (trace.t, getattr(trace, signal)) for name, trace in traces.items()},
            filename,
            title=title,
            y_label=label,
        )
        files.append(filename)
    return files


def cmd_simulate(args, cfg) -> None:
    params = cfg.converter_params()
    scn = cfg.scenario()
    if args.controller == "classic":
        controller = ClassicSmc(params, cfg.smc_config())
    elif args.controller == "dnn":
        controller = DnnSmc(params, load_model(cfg["paths"]["model"]), **cfg.dnn_smc_kwargs())
    else:
        controller = OpenLoopDuty(params, cfg=cfg.smc_config())
    trace = run_scenario(scn, controller)
    out = args.out or os.path.join(cfg["paths"]["out"] or ".", "trace.csv")
    DumpResults(trace.rows(), out, headers=TRACE_HEADER)
    if args.svg:
        _plot_traces({controller.name: trace}, _stem(out), "simulate")
    if len(trace):
        row = {"controller": controller.name, "experiment": "simulate"}
        row.update(ResultSerializer(compute_metrics(trace, scn)))
        print(TabulateFormatter([row], tabulate="terse"))
    print("trace rows: {}, saved to '{}'".format(len(trace), out))


def cmd_dataset(args, cfg) -> None:
    data = generate_dataset(
        cfg.dataset_scenarios(),
        surface_slopes=cfg["dataset"]["surface_slopes"],
        smc_cfg=cfg.smc_config(),
        seed=cfg.seed,
        stride_periods=cfg["dataset"]["stride_periods"],
        skip_s=cfg["dataset"]["skip_s"],
        num_workers=cfg.num_workers,
    )
    out = args.out or cfg["paths"]["dataset"]
    rows = save_dataset(data, out)
    print("dataset rows: {}, saved to '{}'".format(rows, out))


def cmd_train(args, cfg) -> None:
    data = load_dataset(cfg["paths"]["dataset"])
    train_cfg = cfg.train_config()
    net = init_mlp(train_cfg.layer_sizes, train_cfg.activation, train_cfg.seed)
    net, history = train(net, data, train_cfg)
    model_file = cfg["paths"]["model"]
    history_file = cfg["paths"]["history"] or "{}_history.csv".format(_stem(model_file))
    save_model(net, model_file)
    DumpResults(history, history_file, headers=HISTORY_HEADER)
    print(
        "model saved to '{}', history saved to '{}', rmse {:.6g}, R {:.6f}".format(
            model_file,
            history_file,
            evaluate(net, data),
            correlation(predict(net, data.inputs), data.targets),
        )
    )


def cmd_sweep(args, cfg) -> None:
    data = load_dataset(cfg["paths"]["dataset"])
    train_cfg = cfg.train_config(sweep=True)
    rows = hyperparameter_sweep(
        data,
        epochs=train_cfg.epochs,
        seed=cfg.seed,
        layer_sizes=train_cfg.layer_sizes,
        num_workers=cfg.num_workers,
    )
    out = args.out or os.path.join(cfg["paths"]["out"] or ".", "sweep.csv")
    DumpResults(rows, out, headers=SWEEP_HEADER)
    print(TabulateFormatter(rows, tabulate="terse", headers=list(SWEEP_HEADER)))


def cmd_compare(args, cfg) -> None:
    params = cfg.converter_params()
    net = load_model(cfg["paths"]["model"])
    controllers = {
        "smc": ClassicSmc(params, cfg.smc_config()),
        "dnn_smc": DnnSmc(params, net, **cfg.dnn_smc_kwargs()),
    }
    report = compare_controllers(cfg.experiments(), controllers, cfg.num_workers)
    out = args.out or os.path.join(cfg["paths"]["out"] or ".", "report.csv")
    DumpResults(report.rows, out, headers=REPORT_HEADER)
    events = event_rows(report)
    if events:
        DumpResults(events, "{}_events.csv".format(_stem(out)), headers=EVENT_HEADER)
    if args.svg:
        for experiment in report.experiments:
            _plot_traces(
                {name: traces[experiment] for name, traces in report.traces.items()},
                "{}_{}".format(_stem(out), experiment),
                experiment,
            )
    print(TabulateFormatter(report, tabulate="terse"))
    if events:
        print(TabulateFormatter(events, tabulate={"tablefmt": "simple"}))


commands_dispatcher = {
    "simulate": cmd_simulate,
    "dataset": cmd_dataset,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def _add_common(parser):
    parser.add_argument("--config", help="JSON or YAML run configuration file")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--workers", type=int, help="number of worker threads")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="logging level",
    )


def _add_train_flags(parser):
    parser.add_argument("--dataset", help="dataset CSV file")
    parser.add_argument("--epochs", type=int, help="number of training epochs")
    parser.add_argument(
        "--optimizer", choices=["sgd", "adam", "rmsprop"], help="training optimizer"
    )
    parser.add_argument(
        "--activation", choices=["relu", "sigmoid", "tanh"], help="hidden layers activation"
    )
    parser.add_argument("--learning-rate", dest="learning_rate", type=float, help="learning rate")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="buck-smc", description="Buck converter sliding mode control simulator"
    )
    subparsers = parser.add_subparsers(dest="command")

    simulate = subparsers.add_parser("simulate", help="run scenario and save trace")
    _add_common(simulate)
    simulate.add_argument(
        "--controller", choices=["classic", "dnn", "open"], default="classic"
    )
    simulate.add_argument("--model", help="model JSON file for dnn controller")
    simulate.add_argument("--out", help="trace CSV file")
    simulate.add_argument("--svg", action="store_true", help="save SVG plots")

    dataset = subparsers.add_parser("dataset", help="generate training dataset")
    _add_common(dataset)
    dataset.add_argument("--out", help="dataset CSV file")

    train_parser = subparsers.add_parser("train", help="train network")
    _add_common(train_parser)
    _add_train_flags(train_parser)
    train_parser.add_argument("--model", help="model JSON file to save")
    train_parser.add_argument("--history", help="epoch history CSV file")

    sweep = subparsers.add_parser("sweep", help="hyperparameter sweep")
    _add_common(sweep)
    sweep.add_argument("--dataset", help="dataset CSV file")
    sweep.add_argument("--epochs", type=int, help="epochs per cell")
    sweep.add_argument("--out", help="sweep CSV file")

    compare = subparsers.add_parser("compare", help="compare controllers")
    _add_common(compare)
    compare.add_argument("--model", help="model JSON file")
    compare.add_argument("--out", help="report CSV file")
    compare.add_argument("--svg", action="store_true", help="save SVG plots")
    return parser


def main(argv=None) -> int:
    """
    Command line entry point.

    :param argv: (list) arguments, ``sys.argv[1:]`` if None
    :return: exit status
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.error("sub-command required, one of: {}".format(", ".join(commands_dispatcher)))
    logging.basicConfig(level=getattr(logging, args.log_level))
    try:
        cfg = load_run_config(args.config, overrides=_overrides(args))
        commands_dispatcher[args.command](args, cfg)
    except (ValueError, KeyError, TypeError, FileNotFoundError) as e:
        log.error("buck-smc:cli {} failed: {}".format(args.command, e))
        print("buck-smc: {}".format(e), file=sys.stderr)
        return 1
    except RuntimeError as e:
        log.error("buck-smc:cli {} failed: {}".format(args.command, e))
        print("buck-smc: {}".format(e), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
