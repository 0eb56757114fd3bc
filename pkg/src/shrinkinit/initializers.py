"""Weight initialization schemes.

Five schemes share one entry point, :func:`initialize`:

* ``random`` - i.i.d. Gaussian weights.
* ``din``    - per-layer orthonormal weights (polar factor of a Gaussian draw).
* ``bn``     - random weights rescaled layer by layer to unit pre-activation std.
* ``lsuv``   - orthonormal weights followed by the same layer-sequential rescaling.
* ``sinl``   - shrinkage initialization: starting from the outermost pair of
  data layers, rotate the two boundary weights by the singular vectors of the
  least-squares bridge between them, then move one layer inward on each side
  until the middle is reached. An unpaired middle weight is replaced by its
  orthogonal polar factor.

Biases are always initialized to zero.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import NumericError, ParameterError, ShapeError
from .network import Activation, NetworkParams, forward
from .numerics import SvdResult, as_matrix, gaussian_matrix, orthogonal_factor, pinv, svd_full

__all__ = [
    "Scheme",
    "InitSpec",
    "BridgeResult",
    "SinlPlan",
    "init_random",
    "init_din",
    "init_bn",
    "init_lsuv",
    "init_sinl",
    "initialize",
    "normalize_output_variance",
    "compute_bridge",
    "sinl_pair_update",
    "median_normalize",
    "sinl_plan",
]

logger = logging.getLogger(__name__)


class Scheme(str, Enum):
    RANDOM = "random"
    BN = "bn"
    DIN = "din"
    LSUV = "lsuv"
    SINL = "sinl"

    @classmethod
    def parse(cls, value) -> "Scheme":
        try:
            return cls(value.lower() if isinstance(value, str) else value)
        except ValueError:
            raise ParameterError(f"unknown initialization scheme {value!r}") from None


@dataclass(frozen=True)
class InitSpec:
    scheme: Scheme = Scheme.SINL
    gain: float = 1.0
    variance_tol: float = 0.02
    max_var_iters: int = 10
    attach_bn: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if not self.gain > 0:
            raise ParameterError(f"gain must be positive, got {self.gain}")
        if not 0.0 < self.variance_tol < 1.0:
            raise ParameterError(f"variance_tol must lie in (0, 1), got {self.variance_tol}")
        if int(self.max_var_iters) < 1:
            raise ParameterError(f"max_var_iters must be >= 1, got {self.max_var_iters}")


class BridgeResult(NamedTuple):
    e: np.ndarray
    svd: SvdResult


class SinlPlan(NamedTuple):
    """Order of operations for shrinkage initialization of a given depth.

    ``pairs`` holds data-layer index pairs ``(i, j)``; a pair rotates weight
    ``i`` (mapping ``X_i -> X_{i+1}``) and weight ``j - 1``. ``median`` is the
    0-based index of the unpaired middle weight, if any.
    """

    pairs: list[tuple[int, int]]
    median: Optional[int]

    def touched(self) -> list[int]:
        out = []
        for i, j in self.pairs:
            out += [i, j - 1]
        if self.median is not None:
            out.append(self.median)
        return out


def _check_dims(dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ParameterError(f"need at least an input and an output width, got {dims}")
    if min(dims) < 1:
        raise ParameterError(f"layer widths must be positive, got {dims}")
    return dims


def _activations(activation, depth: int) -> list[Activation]:
    if isinstance(activation, (str, Activation)):
        return [Activation.parse(activation)] * depth
    acts = [Activation.parse(a) for a in activation]
    if len(acts) != depth:
        raise ParameterError(f"{len(acts)} activations for {depth} layers")
    return acts


def _assemble(weights, activation) -> NetworkParams:
    return NetworkParams.from_weights(weights, _activations(activation, len(weights)))


def init_random(dims, spec: InitSpec, activation=Activation.SIGMOID) -> NetworkParams:
    dims = _check_dims(dims)
    rng = np.random.default_rng(spec.seed)
    weights = [gaussian_matrix(dims[k + 1], dims[k], spec.gain, rng) for k in range(len(dims) - 1)]
    return _assemble(weights, activation)


def init_din(dims, spec: InitSpec, activation=Activation.SIGMOID) -> NetworkParams:
    """Orthonormal weights: every non-zero singular value equals ``spec.gain``."""
    dims = _check_dims(dims)
    rng = np.random.default_rng(spec.seed)
    weights = [
        spec.gain * orthogonal_factor(gaussian_matrix(dims[k + 1], dims[k], 1.0, rng))
        for k in range(len(dims) - 1)
    ]
    return _assemble(weights, activation)


def normalize_output_variance(params: NetworkParams, x0, spec: InitSpec) -> NetworkParams:
    """Rescale each layer, first to last, to unit pre-activation standard deviation.

    The std is taken over all units and samples of ``W_k X_{k-1} + b_k``.
    Weight and bias of layer ``k`` are divided by it until it lies within
    ``spec.variance_tol`` of 1 or ``spec.max_var_iters`` passes are spent.
    Layer ``k + 1`` sees the data produced by the already finalized layer ``k``.
    """
    x = as_matrix(x0, "x0")
    if x.shape[1] < 2:
        raise ParameterError("variance normalization needs at least two samples")
    if x.shape[0] != params.dims[0]:
        raise ShapeError(f"input has {x.shape[0]} features, network expects {params.dims[0]}")
    for k, layer in enumerate(params.layers):
        weight, bias = layer.weight, layer.bias
        for _ in range(int(spec.max_var_iters)):
            std = float(np.std(weight @ x + bias[:, None]))
            if std == 0.0 or not np.isfinite(std):
                raise NumericError(f"layer {k} pre-activations have zero variance")
            if abs(std - 1.0) <= spec.variance_tol:
                break
            weight, bias = weight / std, bias / std
        params = params.with_layer(k, weight, bias)
        x = forward(NetworkParams((params.layers[k],)), x).output
    return params


def init_bn(dims, x0, spec: InitSpec, activation=Activation.SIGMOID) -> NetworkParams:
    return normalize_output_variance(init_random(dims, spec, activation), x0, spec)


def init_lsuv(dims, x0, spec: InitSpec, activation=Activation.SIGMOID) -> NetworkParams:
    return normalize_output_variance(init_din(dims, spec, activation), x0, spec)


def compute_bridge(xi, xj) -> BridgeResult:
    """Least-squares map ``E = X_j X_i^T (X_i X_i^T)^+`` and its full SVD."""
    xi = as_matrix(xi, "xi")
    xj = as_matrix(xj, "xj")
    if xi.shape[1] != xj.shape[1]:
        raise ShapeError(f"xi has {xi.shape[1]} samples but xj has {xj.shape[1]}")
    e = xj @ xi.T @ pinv(xi @ xi.T)
    return BridgeResult(e, svd_full(e))


def sinl_pair_update(params: NetworkParams, cache, i: int, j: int) -> NetworkParams:
    """Rotate the boundary weights of data layers ``i`` and ``j``.

    Weight ``i`` becomes ``W_i @ V.T`` and weight ``j - 1`` becomes ``U @ W_{j-1}``,
    with ``U``, ``V`` the singular vectors of the bridge from ``X_i`` to ``X_j``.
    """
    if not (0 <= i and j <= params.depth):
        raise ParameterError(f"data-layer indices ({i}, {j}) outside 0..{params.depth}")
    if j - i < 2:
        raise ParameterError(f"pair ({i}, {j}) is adjacent; use median_normalize")
    data = cache.data_layers()
    if len(data) != params.depth + 1:
        raise ShapeError("forward cache does not match the network depth")
    u, _, v = compute_bridge(data[i], data[j]).svd
    params = params.with_layer(i, weight=params.layers[i].weight @ v.T)
    return params.with_layer(j - 1, weight=u @ params.layers[j - 1].weight)


def median_normalize(params: NetworkParams, mid_idx: int) -> NetworkParams:
    """Replace weight ``mid_idx`` (0-based) by its orthogonal polar factor."""
    if not 0 <= mid_idx < params.depth:
        raise ParameterError(f"median index {mid_idx} outside 0..{params.depth - 1}")
    return params.with_layer(mid_idx, weight=orthogonal_factor(params.layers[mid_idx].weight))


def sinl_plan(depth: int) -> SinlPlan:
    if depth < 1:
        raise ParameterError(f"depth must be >= 1, got {depth}")
    i, j = 0, depth
    pairs = []
    while j - i >= 2:
        pairs.append((i, j))
        i, j = i + 1, j - 1
    return SinlPlan(pairs, i if j - i == 1 else None)


def init_sinl(dims, x0, spec: InitSpec, activation=Activation.SIGMOID) -> NetworkParams:
    x0 = as_matrix(x0, "x0")
    params = init_random(dims, spec, activation)
    if x0.shape[0] != params.dims[0]:
        raise ShapeError(f"input has {x0.shape[0]} features, network expects {params.dims[0]}")
    plan = sinl_plan(params.depth)
    for i, j in plan.pairs:
        # inner bridges must see the data produced by the already rotated outer layers
        cache = forward(params, x0)
        params = sinl_pair_update(params, cache, i, j)
        logger.debug("sinl: rotated weights %d and %d", i, j - 1)
    if plan.median is not None:
        params = median_normalize(params, plan.median)
        logger.debug("sinl: normalized median weight %d", plan.median)
    if spec.attach_bn:
        params = normalize_output_variance(params, x0, spec)
    return params


def initialize(dims, x0, spec: InitSpec, activation=Activation.SIGMOID) -> NetworkParams:
    """Dispatch on ``spec.scheme``; ``x0`` (features x samples) is ignored by data-free schemes."""
    scheme = spec.scheme
    if scheme is Scheme.RANDOM:
        return init_random(dims, spec, activation)
    if scheme is Scheme.DIN:
        return init_din(dims, spec, activation)
    if scheme is Scheme.BN:
        return init_bn(dims, x0, spec, activation)
    if scheme is Scheme.LSUV:
        return init_lsuv(dims, x0, spec, activation)
    return init_sinl(dims, x0, spec, activation)
