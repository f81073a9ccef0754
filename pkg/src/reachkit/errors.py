"""Exception types shared across the package."""


class ReachkitError(Exception):
    """Base class for all reachkit-specific errors."""


class DimensionMismatch(ReachkitError):
    """A vector or matrix does not match the ambient dimension."""


class ControlBoundViolation(ReachkitError):
    """A control value exceeds the admissible bound."""


class DegenerateZeroPolynomial(ReachkitError):
    """Root isolation was asked for the identically-zero polynomial."""


class ZeroDirection(ReachkitError):
    """A direction vector is zero where a nonzero one is required."""


class TooFewGenerators(ReachkitError):
    """A zonotope volume needs at least d generators in dimension d."""


class CombinatorialBudgetExceeded(ReachkitError):
    """A subset enumeration would exceed the configured cap."""


class BudgetExceeded(ReachkitError):
    """A brute-force enumeration would exceed its tuple budget."""


class UnsupportedInitialSet(ReachkitError):
    """The requested quantity has no closed form for this initial set."""


class DegenerateHull(ReachkitError):
    """Too few points to define a two-dimensional hull."""
