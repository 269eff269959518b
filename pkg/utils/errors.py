"""
Exception hierarchy for the convolution-power toolkit.

Each error also derives from the builtin a caller would naturally catch
(ValueError for bad input, RuntimeError for budget/solver failures).
"""


class ConvpowError(Exception):
    """Base class for all toolkit errors."""


class LatticeInputError(ConvpowError, ValueError):
    """Malformed lattice data or mismatched dimensions."""


class EmptySupportError(LatticeInputError):
    """Operation needs at least one lattice point."""


class ResourceLimitError(ConvpowError, RuntimeError):
    """A configured memory/size budget would be exceeded."""

    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class NormalizationError(ConvpowError, ValueError):
    """The input is not normalized (sup |phi_hat| != 1)."""


class SeriesConsistencyError(ConvpowError, RuntimeError):
    """Internal consistency failure while building a power series."""


class UnsupportedExponentError(ConvpowError, NotImplementedError):
    """Exponent matrix outside the diagonalizable case."""


class NotPositiveHomogeneousError(ConvpowError, ValueError):
    """Spectrum of the exponent is not of the form 1/(2k)."""


class ClassificationError(ConvpowError, ValueError):
    """Weighted-degree structure or positive definiteness failed."""


class UnsupportedFormError(ConvpowError, ValueError):
    """Closed form requested for a polynomial with cross terms."""


class ComparisonFailure(ConvpowError, ValueError):
    """R is not comparable to the weighted power sum it was tested against."""


class ConvergenceError(ConvpowError, RuntimeError):
    """An iterative solver diverged or failed to converge."""
