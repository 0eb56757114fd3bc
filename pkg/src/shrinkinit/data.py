"""Datasets: CSV ingestion, synthetic blobs, standardization, one-hot targets, splits.

A :class:`Dataset` stores features as a ``(d, n)`` matrix, one column per sample.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .exceptions import DataError, ParameterError

__all__ = ["Dataset", "load_csv", "synth_blobs", "standardize", "one_hot", "split"]


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {features.shape}")
        if labels.shape != (features.shape[1],):
            raise DataError(f"{labels.size} labels for {features.shape[1]} samples")
        if labels.size and (labels.min() < 0 or labels.max() >= self.class_count):
            raise DataError(f"labels must lie in [0, {self.class_count})")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_count", int(self.class_count))

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]

    @property
    def n_features(self) -> int:
        return self.features.shape[0]

    def subset(self, index) -> "Dataset":
        return Dataset(self.features[:, index], self.labels[index], self.class_count)


def _is_number(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False
    return True


def load_csv(path: Union[str, Path], label_column: str = "last") -> Dataset:
    """Read a comma-separated file with one sample per row.

    The header row is optional: it is skipped when any of its fields is
    non-numeric. ``label_column`` is ``"last"`` (default) or ``"first"``;
    labels must be non-negative integers.
    """
    if label_column not in ("last", "first"):
        raise ParameterError(f"label_column must be 'last' or 'first', got {label_column!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(n, row) for n, row in enumerate(csv.reader(fh), start=1) if row]
    if rows and not all(_is_number(f) for f in rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")

    width = len(rows[0][1])
    if width < 2:
        raise DataError(f"{path}: need at least one feature and a label column")
    features = np.empty((len(rows), width - 1))
    labels = np.empty(len(rows), dtype=np.int64)
    for r, (line, row) in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}:{line}: expected {width} fields, got {len(row)}")
        label_field, feature_fields = (row[-1], row[:-1]) if label_column == "last" else (row[0], row[1:])
        try:
            label = int(label_field.strip())
        except ValueError:
            raise DataError(f"{path}:{line}: label {label_field!r} is not an integer") from None
        if label < 0:
            raise DataError(f"{path}:{line}: negative label {label}")
        try:
            features[r] = [float(f) for f in feature_fields]
        except ValueError as exc:
            raise DataError(f"{path}:{line}: {exc}") from None
        if not np.all(np.isfinite(features[r])):
            raise DataError(f"{path}:{line}: non-finite feature value")
        labels[r] = label
    return Dataset(features.T.copy(), labels, int(labels.max()) + 1)


def _class_means(classes: int, dim: int, separation: float) -> np.ndarray:
    # centres evenly spaced on a circle of radius `separation` in the first two
    # axes; a 1-D space gets evenly spaced points on [-separation, separation]
    means = np.zeros((classes, dim))
    if dim == 1:
        if classes > 1:
            means[:, 0] = separation * np.linspace(-1.0, 1.0, classes)
        return means
    angles = 2.0 * np.pi * np.arange(classes) / classes
    means[:, 0] = separation * np.cos(angles)
    means[:, 1] = separation * np.sin(angles)
    return means


def synth_blobs(
    classes: int,
    per_class: Union[int, Sequence[int]],
    dim: int,
    separation: float,
    seed: int,
) -> Dataset:
    """Isotropic unit-variance Gaussian blobs, one per class.

    ``per_class`` is either a single count or one count per class.
    """
    if classes < 1 or dim < 1:
        raise ParameterError(f"classes and dim must be positive, got {classes}, {dim}")
    if not separation > 0:
        raise ParameterError(f"separation must be positive, got {separation}")
    counts = [int(per_class)] * classes if np.isscalar(per_class) else [int(c) for c in per_class]
    if len(counts) != classes or min(counts) < 1:
        raise ParameterError(f"need a positive count for each of {classes} classes, got {per_class}")
    rng = np.random.default_rng(seed)
    means = _class_means(classes, dim, separation)
    labels = np.repeat(np.arange(classes), counts)
    features = means[labels].T + rng.standard_normal((dim, labels.size))
    return Dataset(features, labels, classes)


def standardize(ds: Dataset) -> Dataset:
    """Zero-mean, unit-variance features; constant features are only centred."""
    if ds.n_samples < 2:
        raise ParameterError("standardize needs at least two samples")
    mean = ds.features.mean(axis=1, keepdims=True)
    std = ds.features.std(axis=1, keepdims=True)
    std[std == 0.0] = 1.0
    return Dataset((ds.features - mean) / std, ds.labels, ds.class_count)


def one_hot(ds: Dataset) -> np.ndarray:
    """``(class_count, n)`` indicator matrix."""
    out = np.zeros((ds.class_count, ds.n_samples))
    out[ds.labels, np.arange(ds.n_samples)] = 1.0
    return out


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Shuffled train/test partition; both sides get at least one sample."""
    if not 0.0 < train_fraction < 1.0:
        raise ParameterError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = ds.n_samples
    if n < 2:
        raise ParameterError("cannot split fewer than two samples")
    n_train = min(max(int(round(train_fraction * n)), 1), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    return ds.subset(np.sort(order[:n_train])), ds.subset(np.sort(order[n_train:]))
