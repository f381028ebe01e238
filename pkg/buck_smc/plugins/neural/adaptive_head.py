"""
adaptive_head
#############

Online adapted output layer of a trained network. Hidden layers stay frozen
and provide feature vector ``sigma(x)``, output weights ``W_hat`` follow the
adaptation law::

    dW_hat/dt = gamma * s * sigma(x)

discretized with forward Euler step, optionally projected onto the ball
``||W_hat|| <= w_max``.

Estimate is ``f_hat = W_hat . sigma(x) + offset`` in physical units, where the
trained output weights and bias are de-standardized into ``W_hat`` and
``offset`` by ``head_from_mlp``.

.. autoclass:: buck_smc.plugins.neural.adaptive_head.AdaptiveHead
.. autofunction:: buck_smc.plugins.neural.adaptive_head.f_hat
.. autofunction:: buck_smc.plugins.neural.adaptive_head.adapt
.. autofunction:: buck_smc.plugins.neural.adaptive_head.head_from_mlp
"""
import logging
import math

import numpy as np

from .mlp import Mlp

log = logging.getLogger(__name__)


class AdaptiveHead:
    """
    :param weights_W_hat: (array) output weights, length of last hidden layer
    :param gain_gamma: (float) adaptation gain
    :param approx_error_bound: (float) network approximation error bound
    :param offset: (float) fixed output offset added to the estimate
    :param w_max: (float) projection radius for weights norm, ``inf`` disables it
    """

    def __init__(
        self,
        weights_W_hat,
        gain_gamma: float = 1e3,
        approx_error_bound: float = 0.0,
        offset: float = 0.0,
        w_max: float = math.inf,
    ) -> None:
        self.weights_W_hat = np.array(weights_W_hat, dtype=float).ravel()
        if not np.all(np.isfinite(self.weights_W_hat)):
            raise ValueError("buck-smc:AdaptiveHead weights must be finite")
        if not (math.isfinite(gain_gamma) and gain_gamma >= 0):
            raise ValueError(
                "buck-smc:AdaptiveHead 'gain_gamma' must be finite and nonnegative, "
                "got '{}'".format(gain_gamma)
            )
        if not approx_error_bound >= 0:
            raise ValueError(
                "buck-smc:AdaptiveHead 'approx_error_bound' must be nonnegative, "
                "got '{}'".format(approx_error_bound)
            )
        self.gain_gamma = float(gain_gamma)
        self.approx_error_bound = float(approx_error_bound)
        self.offset = float(offset)
        self.w_max = float(w_max)
        self.projection_count = 0

    def __len__(self) -> int:
        return self.weights_W_hat.size


def _check_features(head: AdaptiveHead, features) -> np.ndarray:
    sigma = np.asarray(features, dtype=float).ravel()
    if sigma.size != head.weights_W_hat.size:
        raise ValueError(
            "buck-smc:AdaptiveHead expected {} features, got {}".format(
                head.weights_W_hat.size, sigma.size
            )
        )
    return sigma


def f_hat(head: AdaptiveHead, features) -> float:
    """Return ``W_hat . sigma + offset``."""
    return float(head.weights_W_hat @ _check_features(head, features)) + head.offset


def adapt(head: AdaptiveHead, s: float, features, dt_s: float) -> AdaptiveHead:
    """
    Apply one Euler step of the adaptation law in place.

    :param head: (AdaptiveHead) head to update
    :param s: (float) sliding surface value
    :param features: (array) feature vector sigma(x)
    :param dt_s: (float) step size, positive
    :return: same head object
    """
    if not dt_s > 0:
        raise ValueError(
            "buck-smc:AdaptiveHead adapt dt_s must be positive, got '{}'".format(dt_s)
        )
    sigma = _check_features(head, features)
    weights = head.weights_W_hat + head.gain_gamma * s * dt_s * sigma
    if not np.all(np.isfinite(weights)):
        raise RuntimeError(
            "buck-smc:AdaptiveHead non-finite weights after adaptation, s={}".format(s)
        )
    norm = float(np.linalg.norm(weights))
    if norm > head.w_max:
        weights *= head.w_max / norm
        head.projection_count += 1
        if head.projection_count == 1:
            log.warning(
                "buck-smc:AdaptiveHead weights projected onto norm {:.6g}".format(head.w_max)
            )
    head.weights_W_hat = weights
    return head


def head_from_mlp(
    net: Mlp,
    gain_gamma: float = 1e3,
    approx_error_bound: float = 0.0,
    w_max_ratio: float = 10.0,
    cold_start: bool = False,
) -> AdaptiveHead:
    """
    Build adaptive head reproducing network physical output exactly.

    :param net: (Mlp) trained network with single output node
    :param gain_gamma: (float) adaptation gain
    :param approx_error_bound: (float) network approximation error bound
    :param w_max_ratio: (float) projection radius relative to trained weights
        norm, ``None`` or zero norm disables projection
    :param cold_start: (bool) if True, start adaptation from zero weights
    """
    if net.layer_sizes[-1] != 1:
        raise ValueError(
            "buck-smc:AdaptiveHead network must have single output, got {}".format(
                net.layer_sizes[-1]
            )
        )
    weights = net.target_std * net.weights[-1][0]
    offset = net.target_mean + net.target_std * float(net.biases[-1][0])
    norm = float(np.linalg.norm(weights))
    w_max = w_max_ratio * norm if (w_max_ratio and norm > 0) else math.inf
    if cold_start:
        weights = np.zeros_like(weights)
    return AdaptiveHead(
        weights,
        gain_gamma=gain_gamma,
        approx_error_bound=approx_error_bound,
        offset=offset,
        w_max=w_max,
    )
