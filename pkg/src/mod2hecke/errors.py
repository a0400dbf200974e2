class DomainError(ValueError):
    """Input outside the mathematical domain an operation supports."""


class InternalError(RuntimeError):
    """A consistency check failed; indicates a bug, not bad input."""
