"""Exception types shared by all modules."""


class MovingWellError(Exception):
    """Base class for errors raised by this package."""


class DomainError(MovingWellError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ConfigurationError(MovingWellError, ValueError):
    """A solver or command was configured inconsistently."""


class NumericError(MovingWellError, ArithmeticError):
    """A numerical procedure failed to meet its internal tolerance."""
