from .dataset import Dataset, save_dataset, load_dataset
from .mlp import (
    Mlp,
    init_mlp,
    forward,
    predict,
    hidden_features,
    cost,
    rmse,
    correlation,
    backward,
    save_model,
    load_model,
)
from .adaptive_head import AdaptiveHead, f_hat, adapt, head_from_mlp
from .trainer import TrainConfig, train, evaluate, hyperparameter_sweep

__all__ = (
    "Dataset",
    "save_dataset",
    "load_dataset",
    "Mlp",
    "init_mlp",
    "forward",
    "predict",
    "hidden_features",
    "cost",
    "rmse",
    "correlation",
    "backward",
    "save_model",
    "load_model",
    "AdaptiveHead",
    "f_hat",
    "adapt",
    "head_from_mlp",
    "TrainConfig",
    "train",
    "evaluate",
    "hyperparameter_sweep",
)
