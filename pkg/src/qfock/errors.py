"""Exception hierarchy shared by every qfock module."""


class QFockError(Exception):
    """Base class for all errors raised by qfock."""


class ArgumentError(QFockError, ValueError):
    """An argument is out of range (letter, index, site, degree)."""


class PreconditionError(QFockError, ValueError):
    """A documented precondition of an operation does not hold."""


class TruncationError(PreconditionError):
    """A creation step would push nonzero mass past the truncation degree."""


class ConfigError(PreconditionError):
    """A run configuration failed to parse or validate."""


class CapabilityError(QFockError):
    """The requested computation exceeds a configured resource ceiling."""


class DefinitenessError(QFockError, ArithmeticError):
    """A symmetrizer failed the numerical positive-definiteness check."""


class StateError(QFockError, RuntimeError):
    """A cache does not hold the data an operation needs."""
