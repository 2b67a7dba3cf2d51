"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the domain an operation accepts."""


class StructureError(ValueError):
    """A table or file is missing required structure (setting pairs, fields, ...)."""


class InsufficientDataError(ValueError):
    """Not enough events to form an estimate."""


class ConsistencyError(RuntimeError):
    """Internal results contradict each other; indicates a bug, not bad input."""
