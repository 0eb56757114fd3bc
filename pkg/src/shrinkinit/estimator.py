"""scikit-learn compatible classifier wrapping initialization + full-batch training."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .data import Dataset
from .initializers import InitSpec, Scheme, initialize
from .network import Activation, forward
from .training import TrainConfig, train

__all__ = ["InitMLPClassifier"]


class InitMLPClassifier(ClassifierMixin, BaseEstimator):
    """Multilayer perceptron classifier with a selectable weight initialization.

    Samples are rows of ``X`` (the scikit-learn convention); internally the
    network works on the transposed ``(n_features, n_samples)`` layout.
    Targets are one-hot vectors fitted with a mean-squared-error objective.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
        Widths of the hidden layers. ``(10, 10)`` gives three weight layers.
    activation : {"sigmoid", "tanh", "relu"}
        Used in every layer, including the output layer.
    init : {"random", "bn", "din", "lsuv", "sinl"}
    gain, variance_tol, max_var_iters, attach_bn
        Forwarded to :class:`~shrinkinit.initializers.InitSpec`.
    epochs, learning_rate, dropout_rate, record_every
        Forwarded to :class:`~shrinkinit.training.TrainConfig`.
    random_state : int
        Seeds both the initializer and dropout sampling.

    Attributes
    ----------
    params_ : NetworkParams
    init_params_ : NetworkParams
        Weights right after initialization, before any training.
    history_ : list of MetricsRecord
    classes_ : ndarray
    n_features_in_ : int
    """

    def __init__(
        self,
        hidden_layer_sizes=(10, 10),
        activation="sigmoid",
        init="sinl",
        gain=1.0,
        variance_tol=0.02,
        max_var_iters=10,
        attach_bn=False,
        epochs=2000,
        learning_rate=0.5,
        dropout_rate=0.0,
        record_every=10,
        random_state=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.init = init
        self.gain = gain
        self.variance_tol = variance_tol
        self.max_var_iters = max_var_iters
        self.attach_bn = attach_bn
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.dropout_rate = dropout_rate
        self.record_every = record_every
        self.random_state = random_state

    def _dataset(self, X, y):
        labels = np.searchsorted(self.classes_, y)
        return Dataset(X.T, labels, len(self.classes_))

    def fit(self, X, y, eval_set=None):
        """Initialize and train.

        ``eval_set=(X_val, y_val)`` supplies the held-out set whose accuracy
        goes into ``history_``; it defaults to the training data.
        """
        X, y = check_X_y(X, y, dtype=np.float64)
        check_classification_targets(y)
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise ValueError("InitMLPClassifier needs at least two classes")
        self.n_features_in_ = X.shape[1]
        activation = Activation.parse(self.activation)
        if activation is Activation.IDENTITY:
            raise ValueError("identity activation is reserved for testing")
        spec = InitSpec(
            Scheme.parse(self.init),
            self.gain,
            self.variance_tol,
            self.max_var_iters,
            self.attach_bn,
            self.random_state,
        )
        cfg = TrainConfig(
            self.epochs,
            self.learning_rate,
            self.dropout_rate,
            min(self.record_every, self.epochs),
            self.random_state,
        )
        train_set = self._dataset(X, y)
        if eval_set is None:
            test_set = train_set
        else:
            X_val, y_val = check_X_y(*eval_set, dtype=np.float64)
            unseen = np.setdiff1d(y_val, self.classes_)
            if unseen.size:
                raise ValueError(f"eval_set contains labels unseen in training: {unseen}")
            test_set = self._dataset(X_val, y_val)
        dims = [X.shape[1], *self.hidden_layer_sizes, len(self.classes_)]
        self.init_params_ = initialize(dims, X.T, spec, activation)
        self.params_, self.history_ = train(self.init_params_, train_set, test_set, cfg)
        return self

    def decision_function(self, X):
        """Raw output-layer activations, shape ``(n_samples, n_classes)``."""
        check_is_fitted(self, "params_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return forward(self.params_, X.T).output.T

    def predict_proba(self, X):
        """Output activations rescaled to sum to one per sample."""
        scores = self.decision_function(X)
        scores = scores - min(scores.min(), 0.0)
        dead = scores.sum(axis=1) == 0.0
        scores[dead] = 1.0
        return scores / scores.sum(axis=1, keepdims=True)

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[np.argmax(scores, axis=1)]
