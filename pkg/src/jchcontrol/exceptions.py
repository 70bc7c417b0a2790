class ResourceLimitError(RuntimeError):
    """Raised when a requested truncation would exceed the configured state budget."""


class PreconditionError(ValueError):
    """Raised when a check is asked to run outside the regime where it is meaningful."""
