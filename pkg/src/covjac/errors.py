"""Shared exception types."""


class DisconnectedGraphError(ValueError):
    """Raised when an operation requires a connected graph."""


class RingMismatchError(ValueError):
    """Raised when operands live in different rings or groups."""


class ResourceLimitError(RuntimeError):
    """Raised when a computation would exceed a configured resource cap."""
