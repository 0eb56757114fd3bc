"""Neural-network weight initialization lab: shrinkage initialization and baselines."""
from .data import Dataset, load_csv, one_hot, split, standardize, synth_blobs
from .estimator import InitMLPClassifier
from .exceptions import DataError, NumericError, ParameterError, ShapeError, ShrinkInitError
from .initializers import InitSpec, Scheme, initialize
from .network import Activation, NetworkParams, forward
from .training import MetricsRecord, TrainConfig, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "DataError",
    "Dataset",
    "InitMLPClassifier",
    "InitSpec",
    "MetricsRecord",
    "NetworkParams",
    "NumericError",
    "ParameterError",
    "Scheme",
    "ShapeError",
    "ShrinkInitError",
    "TrainConfig",
    "evaluate",
    "forward",
    "initialize",
    "load_csv",
    "one_hot",
    "split",
    "standardize",
    "synth_blobs",
    "train",
]
