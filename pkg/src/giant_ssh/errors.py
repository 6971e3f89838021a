"""Exception types shared across the package.

The CLI maps ``InputError`` to exit code 1 and ``NumericError`` to exit code 2.
"""


class InputError(ValueError):
    """Invalid parameters, labels or configuration values."""


class NumericError(RuntimeError):
    """A numerical routine failed or was asked to work outside its domain."""


class PoleError(NumericError):
    """Energy too close to a band pole of a self-consistency sum."""

    def __init__(self, message: str, k: float):
        super().__init__(message)
        self.k = k
