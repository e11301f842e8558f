"""Exception types shared across the toolkit.

The split matters for the CLI exit-code contract: hypothesis violations
(a bound applied where its assumptions fail) are distinguished from
numerical breakdowns (overflow, quadrature that refuses to converge).
"""


class SemiboundError(Exception):
    """Base class for all toolkit errors."""


class SpectrumError(SemiboundError):
    """Spectrum found where an operation requires it absent.

    Carries ``nearest_eigenvalue`` when known, so callers can report which
    eigenvalue broke the requirement.
    """

    def __init__(self, message, nearest_eigenvalue=None):
        super().__init__(message)
        self.nearest_eigenvalue = nearest_eigenvalue


class HypothesisError(SemiboundError):
    """An estimate was requested outside the hypotheses that make it valid."""


class NumericsError(SemiboundError):
    """Numerical failure: overflow, saturation, or an iteration cap hit."""
