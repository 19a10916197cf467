"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConsistencyError(RuntimeError):
    """A computed quantity violated an internal invariant (e.g. a probability far outside [0, 1])."""
