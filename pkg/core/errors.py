"""
Exceptions raised by OfbmID

Every class also derives from the closest builtin exception so that callers
can catch either the specific class or e.g. ``ValueError``.
"""


class OfbmError(Exception):
    """Root of all OfbmID errors."""


class ParameterDomainError(OfbmError, ValueError):
    """An argument lies outside the domain of a model function (e.g. h not in (0,1))."""


class InfeasibleParameterError(OfbmError, ValueError):
    """A parameter vector violates the model constraints (g > 0, h1 <= h2, ...)."""


class EmbeddingError(OfbmError, RuntimeError):
    """Circulant embedding stayed indefinite after the allowed number of doublings.

    Attributes:
        min_eigenvalue (float): most negative eigenvalue of the last embedding
        length (int): circulant length of the last embedding
    """

    def __init__(self, message, min_eigenvalue, length):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.length = length


class ShortPathError(OfbmError, ValueError):
    """The path is too short for the requested coarsest octave."""


class IntervalDomainError(OfbmError, ArithmeticError):
    """Division or logarithm of an interval that touches or straddles zero."""


class InsufficientOctavesError(OfbmError, ValueError):
    """Not enough octaves for a log-scale regression."""


class DegenerateSampleError(OfbmError, ValueError):
    """Samples with zero variance cannot be compared with a Gaussian fit."""
