"""
mlp
###

Fully connected feed forward network built on numpy, default topology
``[2, 3, 3, 1]`` - inputs ``(e, e_dot)``, two hidden layers and a linear
output neuron estimating ``f(x)``.

Forward pass for layer ``k``::

    S_k = m_k @ h_{k-1} + b_k
    h_k = act(S_k)        # hidden layers
    O   = S_last          # linear output

Weights are stored as ``(fan_out, fan_in)`` arrays. Network inputs and
output are standardized with statistics kept on the model; ``forward`` works
on standardized values, ``predict`` maps physical inputs to physical output.

mlp sample usage
================

Initialize a network and evaluate it::

    import numpy as np
    from buck_smc.plugins.neural.mlp import init_mlp, forward, predict

    net = init_mlp([2, 3, 3, 1], activation="relu", seed=0)
    output, pre_activations, activations = forward(net, np.array([0.1, -0.2]))
    f_hat = predict(net, np.array([[0.0, 0.0], [0.5, -250.0]]))

Save and load model JSON document::

    save_model(net, "model.json")
    net = load_model("model.json")

mlp reference
=============

.. autoclass:: buck_smc.plugins.neural.mlp.Mlp
.. autofunction:: buck_smc.plugins.neural.mlp.init_mlp
.. autofunction:: buck_smc.plugins.neural.mlp.forward
.. autofunction:: buck_smc.plugins.neural.mlp.predict
.. autofunction:: buck_smc.plugins.neural.mlp.hidden_features
.. autofunction:: buck_smc.plugins.neural.mlp.cost
.. autofunction:: buck_smc.plugins.neural.mlp.rmse
.. autofunction:: buck_smc.plugins.neural.mlp.correlation
.. autofunction:: buck_smc.plugins.neural.mlp.backward
.. autofunction:: buck_smc.plugins.neural.mlp.save_model
.. autofunction:: buck_smc.plugins.neural.mlp.load_model
"""
import json
import logging
import os
import dataclasses

from typing import List, Tuple

import numpy as np

log = logging.getLogger(__name__)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _sigmoid_prime(x):
    y = _sigmoid(x)
    return y * (1.0 - y)


def _relu(x):
    return np.maximum(x, 0.0)


def _relu_prime(x):
    # subgradient at 0 is 0
    return (x > 0).astype(float)


def _tanh_prime(x):
    return 1.0 - np.tanh(x) ** 2


activations_dispatcher = {
    "relu": {"fun": _relu, "prime": _relu_prime},
    "sigmoid": {"fun": _sigmoid, "prime": _sigmoid_prime},
    "tanh": {"fun": np.tanh, "prime": _tanh_prime},
}


@dataclasses.dataclass
class Mlp:
    """
    Network weights, biases, activation and standardization statistics.

    :param layer_sizes: (list) number of nodes per layer, input layer first
    :param weights: (list) ``(fan_out, fan_in)`` weight arrays m1, m2, m3
    :param biases: (list) bias vectors b1, b2, b3
    :param activation: (str) hidden layers activation - relu, sigmoid or tanh
    :param input_mean: (numpy.ndarray) inputs mean
    :param input_std: (numpy.ndarray) inputs standard deviation
    :param target_mean: (float) target mean
    :param target_std: (float) target standard deviation
    :param seed: (int) seed used for weights initialization
    """

    layer_sizes: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str = "relu"
    input_mean: np.ndarray = None
    input_std: np.ndarray = None
    target_mean: float = 0.0
    target_std: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.activation not in activations_dispatcher:
            raise ValueError(
                "buck-smc:Mlp unsupported activation '{}', supported - {}".format(
                    self.activation, ", ".join(activations_dispatcher)
                )
            )
        if len(self.layer_sizes) < 2 or any(int(i) < 1 for i in self.layer_sizes):
            raise ValueError(
                "buck-smc:Mlp layer_sizes must have at least 2 positive integers, "
                "got '{}'".format(self.layer_sizes)
            )
        self.layer_sizes = [int(i) for i in self.layer_sizes]
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(
            self.weights
        ):
            raise ValueError(
                "buck-smc:Mlp expected {} weight and bias arrays, got {} and {}".format(
                    len(self.layer_sizes) - 1, len(self.weights), len(self.biases)
                )
            )
        for index, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[index + 1], self.layer_sizes[index])
            if w.shape != expected or b.shape != (expected[0],):
                raise ValueError(
                    "buck-smc:Mlp layer {} expected weights {} and biases {}, got {} "
                    "and {}".format(index + 1, expected, (expected[0],), w.shape, b.shape)
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(
                    "buck-smc:Mlp layer {} parameters must be finite".format(index + 1)
                )
        n_in = self.layer_sizes[0]
        self.input_mean = (
            np.zeros(n_in) if self.input_mean is None else np.asarray(self.input_mean, float)
        )
        self.input_std = (
            np.ones(n_in) if self.input_std is None else np.asarray(self.input_std, float)
        )
        self.target_mean = float(self.target_mean)
        self.target_std = float(self.target_std)

    @property
    def hidden_width(self) -> int:
        return self.layer_sizes[-2]

    def copy(self) -> "Mlp":
        return Mlp(
            layer_sizes=list(self.layer_sizes),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            activation=self.activation,
            input_mean=self.input_mean.copy(),
            input_std=self.input_std.copy(),
            target_mean=self.target_mean,
            target_std=self.target_std,
            seed=self.seed,
        )


def init_mlp(
    layer_sizes: List[int] = (2, 3, 3, 1), activation: str = "relu", seed: int = 0
) -> Mlp:
    """
    Create network with scaled uniform weights within
    ``+-sqrt(6 / (fan_in + fan_out))`` and zero biases.

    :param layer_sizes: (list) nodes per layer
    :param activation: (str) hidden layers activation
    :param seed: (int) random generator seed
    """
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(
        layer_sizes=list(layer_sizes),
        weights=weights,
        biases=biases,
        activation=activation,
        seed=seed,
    )


def forward(net: Mlp, inputs) -> Tuple:
    """
    Run forward pass on standardized inputs.

    :param net: (Mlp) network
    :param inputs: (array) single input vector or ``(P, n_in)`` batch
    :return: tuple of (output, pre_activations, activations), where output is a
        float for a single input or ``(P,)`` array for a batch, pre_activations
        lists ``S_k`` per layer and activations lists ``h_k`` per hidden layer
    """
    x = np.asarray(inputs, dtype=float)
    single = x.ndim == 1
    batch = np.atleast_2d(x)
    if batch.ndim != 2 or batch.shape[1] != net.layer_sizes[0]:
        raise ValueError(
            "buck-smc:mlp input must have {} columns, got shape {}".format(
                net.layer_sizes[0], x.shape
            )
        )
    act = activations_dispatcher[net.activation]["fun"]
    pre_activations, activations = [], []
    h = batch
    last = len(net.weights) - 1
    for index, (w, b) in enumerate(zip(net.weights, net.biases)):
        s = h @ w.T + b
        pre_activations.append(s)
        if index < last:
            h = act(s)
            activations.append(h)
    output = pre_activations[-1][:, 0]
    if single:
        return (
            float(output[0]),
            [s[0] for s in pre_activations],
            [h[0] for h in activations],
        )
    return output, pre_activations, activations


def standardize_inputs(net: Mlp, inputs) -> np.ndarray:
    return (np.asarray(inputs, dtype=float) - net.input_mean) / net.input_std


def predict(net: Mlp, inputs):
    """
    Map physical inputs ``(e, e_dot)`` to physical output ``f_hat``.

    :param net: (Mlp) trained network
    :param inputs: (array) single input vector or ``(P, n_in)`` batch
    """
    output = forward(net, standardize_inputs(net, inputs))[0]
    return net.target_mean + net.target_std * output


def hidden_features(net: Mlp, inputs) -> np.ndarray:
    """
    Return last hidden layer activations ``sigma(x)`` for standardized inputs,
    same values ``forward`` produces as its last intermediate activations.
    """
    activations = forward(net, inputs)[2]
    if not activations:
        raise ValueError("buck-smc:mlp network has no hidden layers")
    return activations[-1]


def _check_pair(predictions, targets):
    p = np.asarray(predictions, dtype=float).ravel()
    t = np.asarray(targets, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("buck-smc:mlp predictions and targets must not be empty")
    if p.shape != t.shape:
        raise ValueError(
            "buck-smc:mlp predictions length {} does not match targets length {}".format(
                p.size, t.size
            )
        )
    return p, t


def cost(predictions, targets) -> float:
    """Half mean squared error ``1/(2P) * sum((O_hat - O)^2)``."""
    p, t = _check_pair(predictions, targets)
    return float(0.5 * np.mean((p - t) ** 2))


def rmse(predictions, targets) -> float:
    """Root mean squared error."""
    p, t = _check_pair(predictions, targets)
    return float(np.sqrt(np.mean((p - t) ** 2)))


def correlation(predictions, targets) -> float:
    """Pearson correlation coefficient R, nan if either input is constant."""
    p, t = _check_pair(predictions, targets)
    if p.size < 2 or np.std(p) == 0 or np.std(t) == 0:
        return float("nan")
    return float(np.corrcoef(p, t)[0, 1])


def backward(net: Mlp, inputs, targets) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    Backpropagate half MSE cost on standardized inputs and targets.

    :param net: (Mlp) network
    :param inputs: (array) single input vector or ``(P, n_in)`` batch
    :param targets: (float or array) target value or ``(P,)`` targets
    :return: tuple of (weight gradients, bias gradients) shaped as network
        weights and biases
    """
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    t = np.atleast_1d(np.asarray(targets, dtype=float)).ravel()
    output, pre_activations, activations = forward(net, x)
    if t.shape != output.shape:
        raise ValueError(
            "buck-smc:mlp targets length {} does not match inputs rows {}".format(
                t.size, output.size
            )
        )
    prime = activations_dispatcher[net.activation]["prime"]
    layer_inputs = [x] + activations
    delta = ((output - t) / t.size)[:, None]
    grad_w = [None] * len(net.weights)
    grad_b = [None] * len(net.biases)
    for index in reversed(range(len(net.weights))):
        grad_w[index] = delta.T @ layer_inputs[index]
        grad_b[index] = delta.sum(axis=0)
        if index > 0:
            delta = (delta @ net.weights[index]) * prime(pre_activations[index - 1])
    for g in grad_w + grad_b:
        if not np.all(np.isfinite(g)):
            raise RuntimeError("buck-smc:mlp non-finite gradients, training diverged")
    return grad_w, grad_b


def to_dict(net: Mlp) -> dict:
    return {
        "layer_sizes": list(net.layer_sizes),
        "activation": net.activation,
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "input_mean": net.input_mean.tolist(),
        "input_std": net.input_std.tolist(),
        "target_mean": net.target_mean,
        "target_std": net.target_std,
        "seed": net.seed,
    }


def from_dict(data: dict) -> Mlp:
    missing = [
        k
        for k in ("layer_sizes", "activation", "weights", "biases")
        if k not in data
    ]
    if missing:
        raise ValueError(
            "buck-smc:mlp model document missing keys: {}".format(", ".join(missing))
        )
    return Mlp(
        layer_sizes=data["layer_sizes"],
        weights=[np.array(w, dtype=float) for w in data["weights"]],
        biases=[np.array(b, dtype=float) for b in data["biases"]],
        activation=data["activation"],
        input_mean=data.get("input_mean"),
        input_std=data.get("input_std"),
        target_mean=data.get("target_mean", 0.0),
        target_std=data.get("target_std", 1.0),
        seed=data.get("seed", 0),
    )


def save_model(net: Mlp, filename: str) -> None:
    """Write model JSON document."""
    dirname = os.path.dirname(filename)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(filename, "w", encoding="utf-8") as f:
        f.write(json.dumps(to_dict(net), sort_keys=True, indent=4, separators=(",", ": ")))
        f.write("\n")
    log.debug("buck-smc:mlp saved model to '{}'".format(filename))


def load_model(filename: str) -> Mlp:
    """Load model JSON document written by ``save_model``."""
    with open(filename, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(
                "buck-smc:mlp failed to parse model '{}': {}".format(filename, e)
            )
    return from_dict(data)
