"""Exception hierarchy shared by every module."""


class ShrinkInitError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(ShrinkInitError, ValueError):
    """Operand shapes do not line up."""


class ParameterError(ShrinkInitError, ValueError):
    """A scalar or structural argument is out of its allowed range."""


class DataError(ShrinkInitError, ValueError):
    """Input data is malformed (bad CSV, label out of range, ...)."""


class NumericError(ShrinkInitError, ArithmeticError):
    """A numerical procedure failed: non-convergence, divergence, zero variance."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
