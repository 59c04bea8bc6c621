class QuadromerError(Exception):
    exit_code = 1


class ParameterError(QuadromerError, ValueError):
    """Out-of-range or geometrically invalid parameters."""

    exit_code = 2

    def __init__(self, message, field=None, cell=None):
        super().__init__(message)
        self.field = field
        self.cell = cell


class EncodingError(ParameterError):
    """Region cannot be encoded as a non-intersecting path problem."""


class ToleranceError(QuadromerError, ArithmeticError):
    """A numerical check missed its tolerance."""

    exit_code = 3


class BudgetError(QuadromerError, RuntimeError):
    """A resource budget (cell count, node count) was exceeded."""

    exit_code = 4
