"""Exception types shared across the package."""


class BcvError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BcvError):
    """A point or state left the admissible region (F > 0, r > 0, ...)."""


class DegenerateSurfaceError(BcvError):
    """Chart is singular (dependent partials) or the adapted frame is undefined."""


class SelfConsistencyError(BcvError):
    """Two redundant computations of the same quantity disagreed."""
