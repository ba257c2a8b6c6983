"""Exception types shared across the package.

The CLI maps these onto exit codes: data problems exit with 3, numerical
failures with 4.
"""


class NgaussError(Exception):
    """Base class for all package errors."""


class DomainError(NgaussError, ValueError):
    """Argument outside the mathematical domain of a function."""


class InputError(NgaussError, ValueError):
    """Malformed or invalid input data."""


class ParseError(InputError):
    """A file could not be parsed."""


class NumericalError(NgaussError, ArithmeticError):
    """A numerical procedure failed (singular matrix, non-convergence, ...)."""


class DecompositionError(NumericalError):
    """Cholesky factorization hit a non-positive pivot."""

    def __init__(self, pivot, value):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} = {value!r}")


class FitError(NumericalError):
    """Model fitting failed."""


class PlanError(NgaussError, ValueError):
    """Invalid re-ranking plan."""


class SelectionError(NgaussError, ValueError):
    """No usable candidate during delta selection."""


class NormalityTestError(NumericalError):
    """A normality test cannot be computed on the given sample."""
