"""
Toolkit exceptions. Everything the CLI and HTTP layers translate into a user-facing
error derives from ToolkitError; anything else is a bug.
"""


class ToolkitError(Exception):
    """Base for every expected failure (bad input, bad data, bad configuration)."""


class PhysicsInputError(ToolkitError):
    """Input outside the physical domain of an operation (T <= 0, empty rows, ...)."""


class SaturatedAbsorptionError(PhysicsInputError):
    """A transmission sample is <= 0 so -ln T is undefined."""

    def __init__(self, index: int, value: float):
        super().__init__(f"saturated absorption: transmission {value!r} at grid index {index}")
        self.index = index
        self.value = value


class ConfigurationError(ToolkitError):
    """Missing or inconsistent configuration data (selection table, profile references)."""


class EigenSolverError(ToolkitError):
    """Dense Hermitian eigensolver failed."""

    def __init__(self, message: str, condition_number: float | None = None):
        detail = message
        if condition_number is not None:
            detail = f"{message} (matrix condition number {condition_number:.3e})"
        super().__init__(detail)
        self.condition_number = condition_number


class QuadratureError(ToolkitError):
    """Adaptive quadrature did not reach the requested tolerance."""


class UnderdeterminedFitError(PhysicsInputError):
    """Not enough independent observations to identify the requested parameters."""


class DataFormatError(ToolkitError):
    """Malformed input file; carries the offending line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.column = column


class EmptyInputError(DataFormatError):
    """Input file parsed but contains no data rows."""


class UnitError(ToolkitError, ValueError):
    """Quantity without a recognised unit suffix. Also a ValueError so pydantic reports it."""
