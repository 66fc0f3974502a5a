"""Exception hierarchy shared across the package."""


class AttrankError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(AttrankError, ValueError):
    """Mismatched vector or matrix dimensions."""


class DomainError(AttrankError, ValueError):
    """A value lies outside the domain an operation is defined on."""


class InsufficientDataError(AttrankError, ValueError):
    """Not enough data to carry out the requested operation."""


class DomainTooLargeError(AttrankError):
    """An exact enumeration would exceed the configured guard."""


class EstimationError(AttrankError):
    """Weight estimation is degenerate or failed to converge."""


class IncompleteInputError(AttrankError, KeyError):
    """A required per-item input (score, feature) is missing."""


class UndefinedMetricError(AttrankError):
    """The metric is undefined for this input (for example all-zero relevance)."""


class ConfigError(AttrankError, ValueError):
    """Invalid or unknown configuration."""
