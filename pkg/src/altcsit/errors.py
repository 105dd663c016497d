"""Exception types raised across the package."""


class AltCsitError(Exception):
    """Base class for all package errors."""


class InvalidPmf(AltCsitError, ValueError):
    """A CSIT state distribution violates nonnegativity, normalization or symmetry."""


class DegenerateChannel(AltCsitError):
    """A channel vector needed for zero-forcing is numerically zero."""


class InfeasibleSystem(AltCsitError):
    """The free-variable system of a sub-case has no solution.

    This can only happen if a distribution was classified into the wrong
    sub-case, so it is treated as an internal error.
    """


class WrongCase(AltCsitError):
    """The requested corner point does not exist for this distribution's case."""


class OutsideRegion(AltCsitError):
    """The requested DoF pair lies outside the DoF region."""
