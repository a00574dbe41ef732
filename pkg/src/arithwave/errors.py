"""Exception hierarchy shared by every module."""


class ArithWaveError(Exception):
    """Base class for all package errors."""


class RangeError(ArithWaveError, OverflowError):
    """Input exceeds what the integer arithmetic can represent."""


class DomainError(ArithWaveError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class SizeError(ArithWaveError, MemoryError):
    """Problem too large for the configured memory cap."""


class ResolutionError(ArithWaveError, ValueError):
    """Grid too coarse for the requested exactness."""


class DimensionError(ArithWaveError, ValueError):
    """Operation not available in this dimension."""


class DependencyError(ArithWaveError):
    """Required upstream data (e.g. correlation tuples) is unavailable."""


class NumericError(ArithWaveError, ArithmeticError):
    """A numerical procedure failed to converge."""


class StatisticsError(ArithWaveError, ValueError):
    """Not enough data for a statistical summary."""
