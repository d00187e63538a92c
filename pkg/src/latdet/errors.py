"""Exceptions shared across the package."""


class LatdetError(Exception):
    """Base class for all package errors."""


class RankDeficient(LatdetError):
    """A generator matrix has (numerically) dependent columns."""


class UnsupportedOrder(LatdetError):
    """QAM order outside the supported set {4, 16, 64}."""


class DomainError(LatdetError):
    """A vector does not belong to the domain an operation requires."""


class LengthMismatch(LatdetError):
    """Vector or bit-string length inconsistent with the configuration."""


class TooLarge(LatdetError):
    """An exhaustive enumeration or trace would exceed the safety cap."""


class ConfigError(LatdetError):
    """Invalid sweep or chain configuration."""


class IoError(LatdetError):
    """Result emission failed (unwritable path, closed stream)."""
