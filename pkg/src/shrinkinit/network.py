"""Fully connected network: parameters, forward pass, MSE objective, backprop.

Data is laid out with features as rows and samples as columns, so layer
``k`` computes ``Z_k = W_k @ X_{k-1} + b_k[:, None]`` and ``X_k = act(Z_k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .exceptions import DataError, ParameterError, ShapeError
from .numerics import as_matrix

__all__ = [
    "Activation",
    "Layer",
    "NetworkParams",
    "ForwardCache",
    "Gradients",
    "activation_apply",
    "activation_derivative",
    "forward",
    "objective_mse",
    "backward",
    "accuracy",
]


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"
    # linear layers only exist for closed-form test oracles
    IDENTITY = "identity"

    @classmethod
    def parse(cls, value) -> "Activation":
        try:
            return cls(value.lower() if isinstance(value, str) else value)
        except ValueError:
            raise ParameterError(f"unknown activation {value!r}") from None


def _sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def activation_apply(kind, z) -> np.ndarray:
    kind = Activation.parse(kind)
    z = np.asarray(z, dtype=np.float64)
    if kind is Activation.SIGMOID:
        return _sigmoid(z)
    if kind is Activation.TANH:
        return np.tanh(z)
    if kind is Activation.RELU:
        return np.maximum(z, 0.0)
    return z.copy()


def activation_derivative(kind, z, out=None) -> np.ndarray:
    """Derivative of the activation at ``z``; ``out`` may pass the cached act(z)."""
    kind = Activation.parse(kind)
    if kind is Activation.SIGMOID:
        s = _sigmoid(z) if out is None else out
        return s * (1.0 - s)
    if kind is Activation.TANH:
        t = np.tanh(z) if out is None else out
        return 1.0 - t * t
    if kind is Activation.RELU:
        # subgradient 0 at the kink
        return (z > 0.0).astype(np.float64)
    return np.ones_like(z)


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Layer:
    weight: np.ndarray
    bias: np.ndarray
    activation: Activation = Activation.SIGMOID

    def __post_init__(self):
        weight = _frozen(as_matrix(self.weight, "weight"))
        bias = _frozen(np.ravel(self.bias))
        if bias.shape[0] != weight.shape[0]:
            raise ShapeError(
                f"bias of length {bias.shape[0]} does not match weight {weight.shape}"
            )
        if not np.all(np.isfinite(bias)):
            raise ParameterError("bias contains non-finite entries")
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "activation", Activation.parse(self.activation))

    @property
    def shape(self) -> tuple[int, int]:
        return self.weight.shape

    def replace(self, weight=None, bias=None) -> "Layer":
        return Layer(
            self.weight if weight is None else weight,
            self.bias if bias is None else bias,
            self.activation,
        )


@dataclass(frozen=True)
class NetworkParams:
    """Immutable ordered stack of layers; widths must chain."""

    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ParameterError("a network needs at least one layer")
        for k in range(1, len(layers)):
            if layers[k].shape[1] != layers[k - 1].shape[0]:
                raise ShapeError(
                    f"layer {k} expects input width {layers[k].shape[1]} "
                    f"but layer {k - 1} outputs {layers[k - 1].shape[0]}"
                )
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_weights(cls, weights: Sequence, activations=Activation.SIGMOID, biases=None):
        if isinstance(activations, (str, Activation)):
            activations = [activations] * len(weights)
        if biases is None:
            biases = [np.zeros(np.shape(w)[0]) for w in weights]
        return cls(tuple(Layer(w, b, a) for w, b, a in zip(weights, biases, activations)))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def dims(self) -> list[int]:
        return [self.layers[0].shape[1]] + [layer.shape[0] for layer in self.layers]

    @property
    def weights(self) -> list[np.ndarray]:
        return [layer.weight for layer in self.layers]

    @property
    def biases(self) -> list[np.ndarray]:
        return [layer.bias for layer in self.layers]

    def with_layer(self, index: int, weight=None, bias=None) -> "NetworkParams":
        layers = list(self.layers)
        layers[index] = layers[index].replace(weight, bias)
        return NetworkParams(tuple(layers))


@dataclass
class ForwardCache:
    inputs: np.ndarray
    pre_acts: list[np.ndarray]
    post_acts: list[np.ndarray]
    dropout_masks: Optional[list[np.ndarray]] = None
    dropout_rate: float = 0.0

    @property
    def output(self) -> np.ndarray:
        return self.post_acts[-1]

    def data_layers(self) -> list[np.ndarray]:
        """``[X_0, X_1, ..., X_m]``: the input followed by every layer output."""
        return [self.inputs, *self.post_acts]


@dataclass
class Gradients:
    weights: list[np.ndarray] = field(default_factory=list)
    biases: list[np.ndarray] = field(default_factory=list)


def forward(params: NetworkParams, x0, dropout_rate: float = 0.0, rng=None, masks=None) -> ForwardCache:
    """Run the network on ``x0`` (features x samples) and cache every layer.

    With ``dropout_rate > 0`` each hidden output entry is zeroed with that
    probability and survivors are scaled by ``1 / (1 - dropout_rate)``; the
    final layer is never dropped. Passing ``masks`` (from an earlier cache)
    replays those exact masks instead of sampling from ``rng``.
    """
    x0 = as_matrix(x0, "x0")
    if x0.shape[0] != params.dims[0]:
        raise ShapeError(f"input has {x0.shape[0]} features, network expects {params.dims[0]}")
    if not 0.0 <= dropout_rate < 1.0:
        raise ParameterError(f"dropout_rate must lie in [0, 1), got {dropout_rate}")
    use_dropout = dropout_rate > 0.0 or masks is not None
    if masks is None and dropout_rate > 0.0:
        if rng is None:
            raise ParameterError("dropout requires a seeded generator")
        rng = np.random.default_rng(rng)
    if masks is not None and len(masks) != params.depth - 1:
        raise ShapeError(f"expected {params.depth - 1} dropout masks, got {len(masks)}")

    pre, post, used_masks = [], [], []
    x = x0
    for k, layer in enumerate(params.layers):
        z = layer.weight @ x + layer.bias[:, None]
        x = activation_apply(layer.activation, z)
        if use_dropout and k < params.depth - 1:
            if masks is not None:
                mask = masks[k]
                if mask.shape != x.shape:
                    raise ShapeError(f"dropout mask {k} has shape {mask.shape}, expected {x.shape}")
            else:
                mask = (rng.random(x.shape) >= dropout_rate).astype(np.float64)
            used_masks.append(mask)
            x = x * mask / (1.0 - dropout_rate)
        pre.append(z)
        post.append(x)
    return ForwardCache(
        x0, pre, post, used_masks if use_dropout else None, dropout_rate if use_dropout else 0.0
    )


def objective_mse(output, targets) -> float:
    """``||output - targets||_F**2 / (2 n)`` with ``n`` the number of columns."""
    output = np.asarray(output, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if output.shape != targets.shape or output.ndim != 2:
        raise ShapeError(f"output {output.shape} and targets {targets.shape} differ")
    diff = output - targets
    return float(np.sum(diff * diff) / (2.0 * output.shape[1]))


def backward(params: NetworkParams, cache: ForwardCache, targets) -> Gradients:
    """Exact gradients of :func:`objective_mse` for every weight and bias."""
    targets = np.asarray(targets, dtype=np.float64)
    if len(cache.pre_acts) != params.depth:
        raise ShapeError(f"cache holds {len(cache.pre_acts)} layers, network has {params.depth}")
    for k, layer in enumerate(params.layers):
        if cache.pre_acts[k].shape[0] != layer.shape[0]:
            raise ShapeError(f"cache layer {k} is stale: width {cache.pre_acts[k].shape[0]} vs {layer.shape[0]}")
    if targets.shape != cache.output.shape:
        raise ShapeError(f"targets {targets.shape} do not match output {cache.output.shape}")

    n = targets.shape[1]
    inputs = cache.data_layers()
    grads_w: list[np.ndarray] = [None] * params.depth
    grads_b: list[np.ndarray] = [None] * params.depth
    upstream = (cache.output - targets) / n
    for k in range(params.depth - 1, -1, -1):
        layer = params.layers[k]
        z = cache.pre_acts[k]
        if cache.dropout_masks is not None and k < params.depth - 1:
            upstream = upstream * cache.dropout_masks[k] / (1.0 - cache.dropout_rate)
            act_out = None
        else:
            act_out = cache.post_acts[k]
        delta = upstream * activation_derivative(layer.activation, z, act_out)
        grads_w[k] = delta @ inputs[k].T
        grads_b[k] = delta.sum(axis=1)
        upstream = layer.weight.T @ delta
    return Gradients(grads_w, grads_b)


def accuracy(output, labels) -> float:
    """Fraction of columns whose argmax row equals the label (ties go to the lowest row)."""
    output = as_matrix(output, "output")
    labels = np.asarray(labels)
    if labels.shape != (output.shape[1],):
        raise ShapeError(f"{labels.shape[0] if labels.ndim else 0} labels for {output.shape[1]} samples")
    if labels.size and (labels.min() < 0 or labels.max() >= output.shape[0]):
        raise DataError(f"labels must lie in [0, {output.shape[0]})")
    return float(np.mean(np.argmax(output, axis=0) == labels))
