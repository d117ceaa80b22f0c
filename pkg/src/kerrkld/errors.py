"""Exception types shared across the package."""


class KerrKLDError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(KerrKLDError, ValueError):
    pass


class ContractViolationError(KerrKLDError, ValueError):
    """An input violates a documented precondition (hermiticity, normalization, ...)."""


class TruncationLeakageError(KerrKLDError, ValueError):
    pass


class RankDeficiencyError(KerrKLDError, ValueError):
    """A matrix function singular at zero was requested on a rank-deficient matrix.

    The smallest offending eigenvalue is kept on ``eigenvalue``.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class DomainError(KerrKLDError, ValueError):
    pass


class OrbitDivergenceError(KerrKLDError, ArithmeticError):
    """A classical orbit became non-finite."""


class UndefinedMeasureError(KerrKLDError, ValueError):
    pass


class ConfigError(KerrKLDError, ValueError):
    """Invalid run configuration; ``field`` names the offending parameter."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
