"""Desk-scale neural classifiers and their training loop."""

from .arch import (
    ArchKind,
    ArchitectureDescriptor,
    LayerShape,
    count_parameters,
    infer_shapes,
)
from .model import Classifier, forward, loss_and_gradients, sigmoid
from .serialize import load_model, save_model
from .train import (
    BestModelSave,
    EarlyStopping,
    SweepGrid,
    SweepRow,
    TrainConfig,
    TrainHistory,
    evaluate,
    hyperparameter_sweep,
    sweep_to_csv,
    train,
)

__all__ = [
    "ArchKind", "ArchitectureDescriptor", "LayerShape", "count_parameters", "infer_shapes",
    "Classifier", "forward", "loss_and_gradients", "sigmoid", "load_model", "save_model",
    "BestModelSave", "EarlyStopping", "SweepGrid", "SweepRow", "TrainConfig", "TrainHistory",
    "evaluate", "hyperparameter_sweep", "sweep_to_csv", "train",
]
