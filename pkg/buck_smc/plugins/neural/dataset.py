"""
dataset
#######

Training samples ``(e, e_dot, f)`` - tracking error, its rate of change and
the nonlinear term ``f(x) = v_o/(L*C) + dv_o/dt/(R*C)`` - plus CSV codec.

CSV layout::

    e,edot,f
    4.9876,-2493.1,390312.5

.. autoclass:: buck_smc.plugins.neural.dataset.Dataset
.. autofunction:: buck_smc.plugins.neural.dataset.save_dataset
.. autofunction:: buck_smc.plugins.neural.dataset.load_dataset
"""
import csv
import logging
import os

import numpy as np

log = logging.getLogger(__name__)

DATASET_HEADER = ("e", "edot", "f")


class Dataset:
    """
    :param inputs: (array) ``(P, 2)`` array of ``(e, e_dot)`` rows
    :param targets: (array) ``(P,)`` array of ``f`` values
    """

    def __init__(self, inputs, targets) -> None:
        self.inputs = np.asarray(inputs, dtype=float).reshape(-1, 2)
        self.targets = np.asarray(targets, dtype=float).ravel()
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError(
                "buck-smc:Dataset inputs rows {} do not match targets rows {}".format(
                    self.inputs.shape[0], self.targets.shape[0]
                )
            )
        if self.targets.size == 0:
            raise ValueError("buck-smc:Dataset must contain at least one row")
        if not (np.all(np.isfinite(self.inputs)) and np.all(np.isfinite(self.targets))):
            raise ValueError("buck-smc:Dataset values must be finite")

    def __len__(self) -> int:
        return self.targets.size

    def rows(self):
        for (e, edot), f in zip(self.inputs.tolist(), self.targets.tolist()):
            yield e, edot, f

    def shuffled(self, seed: int) -> "Dataset":
        order = np.random.default_rng(seed).permutation(len(self))
        return Dataset(self.inputs[order], self.targets[order])


def save_dataset(data: Dataset, filename: str) -> int:
    """
    Write dataset CSV with ``e,edot,f`` header and ``repr`` floats.

    :return: number of rows written, header excluded
    """
    dirname = os.path.dirname(filename)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(filename, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for row in data.rows():
            writer.writerow([repr(v) for v in row])
    log.debug("buck-smc:dataset saved {} rows to '{}'".format(len(data), filename))
    return len(data)


def load_dataset(filename: str) -> Dataset:
    """Read dataset CSV written by ``save_dataset``."""
    inputs, targets = [], []
    with open(filename, "r", newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != DATASET_HEADER:
            raise ValueError(
                "buck-smc:dataset '{}' header must be '{}', got '{}'".format(
                    filename, ",".join(DATASET_HEADER), header
                )
            )
        for line_number, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                e, edot, target = (float(i) for i in row)
            except ValueError:
                raise ValueError(
                    "buck-smc:dataset '{}' line {} malformed: {}".format(
                        filename, line_number, row
                    )
                )
            inputs.append((e, edot))
            targets.append(target)
    return Dataset(inputs, targets)
