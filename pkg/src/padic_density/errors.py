"""Exception types shared across the package."""


class PadicDensityError(Exception):
    """Base class for all computational errors raised by this package."""


class SpecMismatch(PadicDensityError):
    """Operands belong to different fields or precision levels."""


class NonUnit(PadicDensityError):
    """Inversion of an element that is not a unit."""


class PrecisionExhausted(PadicDensityError):
    """The requested quantity is not determined at the available precision.

    Carries ``needed`` (absolute precision that would suffice) when known.
    """

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed


class DegenerateInput(PadicDensityError):
    """The quadratic part is exactly singular."""


class NonConvergent(PadicDensityError):
    """The density sum has a tail ratio of absolute value >= 1."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InternalInconsistency(PadicDensityError):
    """Two independent evaluation routes disagreed; indicates a bug."""


class BudgetExceeded(PadicDensityError):
    """A brute-force enumeration would exceed the configured budget."""
