"""Exception taxonomy shared across the package."""


class ConfigurationError(ValueError):
    """A market, schedule, or solver configuration is internally inconsistent."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """A computation produced non-finite values."""
