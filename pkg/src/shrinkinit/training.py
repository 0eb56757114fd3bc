"""Full-batch gradient-descent training with per-epoch metric records."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .data import Dataset, one_hot
from .exceptions import NumericError, ParameterError, ShapeError
from .network import NetworkParams, accuracy, backward, forward, objective_mse

__all__ = ["TrainConfig", "MetricsRecord", "train", "evaluate"]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10_000
    learning_rate: float = 0.5
    dropout_rate: float = 0.0
    record_every: int = 10
    seed: int = 0

    def __post_init__(self):
        if int(self.epochs) < 1:
            raise ParameterError(f"epochs must be positive, got {self.epochs}")
        if not self.learning_rate >= 0:
            raise ParameterError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ParameterError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if not 1 <= int(self.record_every) <= int(self.epochs):
            raise ParameterError(f"record_every must lie in [1, epochs], got {self.record_every}")


class MetricsRecord(NamedTuple):
    epoch: int
    objective: float
    train_accuracy: float
    test_accuracy: float


def _check_compatible(params: NetworkParams, ds: Dataset):
    if ds.n_features != params.dims[0]:
        raise ShapeError(f"dataset has {ds.n_features} features, network expects {params.dims[0]}")
    if ds.class_count > params.dims[-1]:
        raise ShapeError(f"{ds.class_count} classes but only {params.dims[-1]} output units")


def _targets(params: NetworkParams, ds: Dataset) -> np.ndarray:
    targets = np.zeros((params.dims[-1], ds.n_samples))
    targets[: ds.class_count] = one_hot(ds)
    return targets


def evaluate(params: NetworkParams, dataset: Dataset) -> tuple[float, float]:
    """Objective and accuracy on ``dataset`` with dropout disabled."""
    _check_compatible(params, dataset)
    output = forward(params, dataset.features).output
    return objective_mse(output, _targets(params, dataset)), accuracy(output, dataset.labels)


def train(
    params: NetworkParams, train_set: Dataset, test_set: Dataset, cfg: TrainConfig
) -> tuple[NetworkParams, list[MetricsRecord]]:
    """Plain gradient descent on the whole training set, one step per epoch.

    Metrics are recorded before the first step (epoch 0), after every
    ``cfg.record_every`` steps, and after the final step. The recorded
    objective is the dropout-free training objective.

    Raises
    ------
    NumericError
        If the objective or any parameter stops being finite; ``iteration``
        holds the offending epoch.
    """
    _check_compatible(params, train_set)
    _check_compatible(params, test_set)
    targets = _targets(params, train_set)
    rng = np.random.default_rng(cfg.seed) if cfg.dropout_rate > 0 else None
    weights = [w.copy() for w in params.weights]
    biases = [b.copy() for b in params.biases]
    acts = [layer.activation for layer in params.layers]

    def record(epoch, current):
        with np.errstate(over="ignore", invalid="ignore"):
            objective, train_acc = evaluate(current, train_set)
        if not np.isfinite(objective):
            raise NumericError(f"objective diverged at epoch {epoch}", iteration=epoch)
        return MetricsRecord(epoch, objective, train_acc, evaluate(current, test_set)[1])

    history = [record(0, params)]
    current = params
    for epoch in range(1, cfg.epochs + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            cache = forward(current, train_set.features, cfg.dropout_rate, rng)
            grads = backward(current, cache, targets)
        for k in range(len(weights)):
            weights[k] = weights[k] - cfg.learning_rate * grads.weights[k]
            biases[k] = biases[k] - cfg.learning_rate * grads.biases[k]
        try:
            current = NetworkParams.from_weights(weights, acts, biases)
        except (ParameterError, NumericError):
            raise NumericError(f"parameters diverged at epoch {epoch}", iteration=epoch) from None
        if epoch % cfg.record_every == 0 or epoch == cfg.epochs:
            history.append(record(epoch, current))
    return current, history
