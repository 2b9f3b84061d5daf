"""Exception hierarchy shared by every module."""


class PrimeremError(Exception):
    """Base class for all library errors."""


class DomainError(PrimeremError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation at a pole (li at x = 1)."""


class RangeError(PrimeremError, ValueError):
    """Argument above the configured computational range."""


class ConfigError(PrimeremError):
    """Invalid configuration value or request."""


class ChecksumError(PrimeremError):
    """Checkpoint cache failed its integrity check."""
