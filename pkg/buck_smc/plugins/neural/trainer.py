"""
trainer
#######

Full batch backpropagation training of ``Mlp`` networks using one of
``sgd``, ``adam`` or ``rmsprop`` optimizers, plus hyperparameter sweep over
optimizer and activation combinations.

Inputs and targets are standardized with training set statistics which are
stored on the trained model. Each epoch is one weight update, history keeps
``(epoch, cost, rmse)`` evaluated before that update.

trainer sample usage
====================

Train network on dataset CSV::

    from buck_smc.plugins.neural.dataset import load_dataset
    from buck_smc.plugins.neural.mlp import init_mlp
    from buck_smc.plugins.neural.trainer import TrainConfig, train

    data = load_dataset("dataset.csv")
    cfg = TrainConfig(optimizer="sgd", activation="relu", epochs=260)
    net, history = train(init_mlp(cfg.layer_sizes, cfg.activation, cfg.seed), data, cfg)

Run 3x3 sweep at 50 epochs::

    rows = hyperparameter_sweep(data, epochs=50, seed=0)

Sweep returns a list of dictionaries::

    [{"optimizer": "sgd", "activation": "relu", "rmse": 0.0123, "best": True}, ...]

trainer reference
=================

.. autoclass:: buck_smc.plugins.neural.trainer.TrainConfig
.. autofunction:: buck_smc.plugins.neural.trainer.train
.. autofunction:: buck_smc.plugins.neural.trainer.hyperparameter_sweep
"""
import logging
import math
import dataclasses

from typing import List, Tuple

import numpy as np

from .dataset import Dataset
from .mlp import Mlp, activations_dispatcher, backward, cost, forward, init_mlp, rmse
from ..runners.QueueRunner import QueueRunner

log = logging.getLogger(__name__)


class Sgd:
    def __init__(self, learning_rate: float) -> None:
        self.learning_rate = learning_rate

    def step(self, params: List[np.ndarray], grads: List[np.ndarray]) -> None:
        for p, g in zip(params, grads):
            p -= self.learning_rate * g


class Adam:
    def __init__(
        self,
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params: List[np.ndarray], grads: List[np.ndarray]) -> None:
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1 ** self.t)
            v_hat = v / (1.0 - self.beta2 ** self.t)
            p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


class RmsProp:
    def __init__(self, learning_rate: float, decay: float = 0.9, eps: float = 1e-8) -> None:
        self.learning_rate = learning_rate
        self.decay = decay
        self.eps = eps
        self.v = None

    def step(self, params: List[np.ndarray], grads: List[np.ndarray]) -> None:
        if self.v is None:
            self.v = [np.zeros_like(p) for p in params]
        for p, g, v in zip(params, grads, self.v):
            v *= self.decay
            v += (1.0 - self.decay) * g * g
            p -= self.learning_rate * g / (np.sqrt(v) + self.eps)


optimizers_dispatcher = {
    "sgd": {"fun": Sgd, "learning_rate": 0.2},
    "adam": {"fun": Adam, "learning_rate": 0.01},
    "rmsprop": {"fun": RmsProp, "learning_rate": 0.005},
}


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """
    :param optimizer: (str) sgd, adam or rmsprop
    :param activation: (str) hidden layers activation for new networks
    :param learning_rate: (float) step size, optimizer default if None
    :param epochs: (int) number of full batch updates
    :param seed: (int) weights initialization seed for new networks
    :param layer_sizes: (tuple) topology for new networks
    :param log_every: (int) log cost every that many epochs at debug level
    """

    optimizer: str = "sgd"
    activation: str = "relu"
    learning_rate: float = None
    epochs: int = 260
    seed: int = 0
    layer_sizes: Tuple[int, ...] = (2, 3, 3, 1)
    log_every: int = 50

    def __post_init__(self):
        if self.optimizer not in optimizers_dispatcher:
            raise ValueError(
                "buck-smc:TrainConfig unsupported optimizer '{}', supported - {}".format(
                    self.optimizer, ", ".join(optimizers_dispatcher)
                )
            )
        if self.activation not in activations_dispatcher:
            raise ValueError(
                "buck-smc:TrainConfig unsupported activation '{}', supported - {}".format(
                    self.activation, ", ".join(activations_dispatcher)
                )
            )
        if isinstance(self.epochs, bool) or not isinstance(self.epochs, int) or self.epochs < 1:
            raise ValueError(
                "buck-smc:TrainConfig 'epochs' must be integer >= 1, got '{}'".format(
                    self.epochs
                )
            )
        if self.learning_rate is not None and not (
            math.isfinite(self.learning_rate) and self.learning_rate >= 0
        ):
            raise ValueError(
                "buck-smc:TrainConfig 'learning_rate' must be finite and nonnegative, "
                "got '{}'".format(self.learning_rate)
            )

    @property
    def lr(self) -> float:
        if self.learning_rate is None:
            return optimizers_dispatcher[self.optimizer]["learning_rate"]
        return self.learning_rate


def _standardization(values: np.ndarray):
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return mean, std


def train(net: Mlp, data: Dataset, cfg: TrainConfig) -> Tuple[Mlp, List[Tuple[int, float, float]]]:
    """
    Train copy of the network on dataset.

    :param net: (Mlp) initial network, not modified
    :param data: (Dataset) training samples
    :param cfg: (TrainConfig) training parameters
    :return: tuple of (trained network, history list of (epoch, cost, rmse))
    """
    if len(data) < 1:
        raise ValueError("buck-smc:trainer dataset is empty")
    net = net.copy()
    net.input_mean, net.input_std = _standardization(data.inputs)
    target_mean, target_std = _standardization(data.targets)
    net.target_mean, net.target_std = float(target_mean), float(target_std)
    x = (data.inputs - net.input_mean) / net.input_std
    y = (data.targets - net.target_mean) / net.target_std

    optimizer = optimizers_dispatcher[cfg.optimizer]["fun"](cfg.lr)
    params = net.weights + net.biases
    history = []
    for epoch in range(1, cfg.epochs + 1):
        output = forward(net, x)[0]
        epoch_cost = cost(output, y)
        if not math.isfinite(epoch_cost):
            raise RuntimeError(
                "buck-smc:trainer divergence at epoch {}, cost '{}'".format(epoch, epoch_cost)
            )
        history.append((epoch, epoch_cost, rmse(output, y)))
        if cfg.log_every and epoch % cfg.log_every == 0:
            log.debug(
                "buck-smc:trainer {}/{} epoch {} cost {:.6g}".format(
                    cfg.optimizer, net.activation, epoch, epoch_cost
                )
            )
        try:
            grad_w, grad_b = backward(net, x, y)
        except RuntimeError:
            raise RuntimeError(
                "buck-smc:trainer divergence at epoch {}, non-finite gradients".format(epoch)
            )
        optimizer.step(params, grad_w + grad_b)
        if not all(np.all(np.isfinite(p)) for p in params):
            raise RuntimeError(
                "buck-smc:trainer divergence at epoch {}, non-finite weights".format(epoch)
            )
    return net, history


def evaluate(net: Mlp, data: Dataset) -> float:
    """RMSE of trained network on dataset, standardized scale."""
    x = (data.inputs - net.input_mean) / net.input_std
    y = (data.targets - net.target_mean) / net.target_std
    return rmse(forward(net, x)[0], y)


def _sweep_cell(data: Dataset, cfg: TrainConfig) -> float:
    try:
        net, _ = train(init_mlp(cfg.layer_sizes, cfg.activation, cfg.seed), data, cfg)
        value = evaluate(net, data)
    except RuntimeError as e:
        log.warning(
            "buck-smc:trainer sweep cell {}/{} diverged: {}".format(
                cfg.optimizer, cfg.activation, e
            )
        )
        return math.inf
    return value if math.isfinite(value) else math.inf


def hyperparameter_sweep(
    data: Dataset,
    epochs: int = 50,
    seed: int = 0,
    layer_sizes: Tuple[int, ...] = (2, 3, 3, 1),
    learning_rates: dict = None,
    num_workers: int = 1,
) -> List[dict]:
    """
    Train one network per optimizer and activation combination, every cell
    initialized with the same seed.

    :param data: (Dataset) training samples
    :param epochs: (int) epochs per cell
    :param seed: (int) weights initialization seed
    :param layer_sizes: (tuple) network topology
    :param learning_rates: (dict) optional optimizer name to learning rate mapping
    :param num_workers: (int) QueueRunner worker threads
    :return: list of ``{"optimizer", "activation", "rmse", "best"}`` dictionaries
        ordered by optimizer then activation, diverged cells have ``inf`` rmse
    """
    if len(data) < 1:
        raise ValueError("buck-smc:trainer dataset is empty")
    learning_rates = learning_rates or {}
    jobs = {}
    for optimizer in optimizers_dispatcher:
        for activation in activations_dispatcher:
            cfg = TrainConfig(
                optimizer=optimizer,
                activation=activation,
                learning_rate=learning_rates.get(optimizer),
                epochs=epochs,
                seed=seed,
                layer_sizes=tuple(layer_sizes),
                log_every=0,
            )
            jobs[(optimizer, activation)] = {
                "fun": _sweep_cell,
                "kwargs": {"data": data, "cfg": cfg},
            }
    results = QueueRunner(num_workers).run(jobs)
    best = min(results, key=lambda k: results[k])
    return [
        {
            "optimizer": optimizer,
            "activation": activation,
            "rmse": value,
            "best": (optimizer, activation) == best,
        }
        for (optimizer, activation), value in results.items()
    ]
