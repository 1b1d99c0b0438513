"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid input data (non-finite entries, bad parameters, malformed specs)."""


class DimensionError(ValueError):
    """Dimension of an argument does not match what the operation requires."""


class ConsistencyError(ArithmeticError):
    """An internal numerical invariant was violated (e.g. a statistic far below 0)."""
