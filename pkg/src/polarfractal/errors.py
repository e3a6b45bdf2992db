"""Shared exception types."""


class TrivialPeriodError(ValueError):
    """Raised for all-zero or all-one periods, whose map has no interior
    fixed point."""


class UnresolvedError(RuntimeError):
    """Raised when an iterative classifier cannot decide within its budget."""


class ResourceLimitError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the configured
    memory budget; callers should switch to the streaming/sampling path."""
