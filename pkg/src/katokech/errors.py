"""Exception hierarchy shared by all katokech modules."""

from __future__ import annotations


class KatokError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(KatokError, ValueError):
    """The Katok parameter is outside the open interval (0, 1)."""


class AmbiguousFloor(KatokError, ArithmeticError):
    """A floor could not be certified at the working precision.

    ``k`` is the multiplier of the offending argument when known.
    """

    def __init__(self, message: str, k: int | None = None, x=None):
        super().__init__(message)
        self.k = k
        self.x = x


class DegenerateIterate(AmbiguousFloor):
    """An iterate n*theta is exactly an integer (rational parameter)."""


class AmbiguousComparison(KatokError, ArithmeticError):
    """Two actions are too close to order at the working precision."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class FloorSumOverflow(KatokError, OverflowError):
    """A floor sum left the 128-bit accumulator range."""


class NotFound(KatokError, LookupError):
    """No orbit set of the requested degree exists within the search bound."""


class BijectionViolation(KatokError, AssertionError):
    """Two orbit sets in one homology class share a grading."""


class NegativeGrading(KatokError, AssertionError):
    """Internal consistency failure: a grading came out negative or odd."""


class DegeneratePoint(KatokError, ValueError):
    """Phase point on (or numerically at) the zero section."""


class NoConvergence(KatokError, RuntimeError):
    """An iterative solve exceeded its iteration cap."""


class IllConditioned(KatokError, RuntimeError):
    """A finite-difference linearization failed its consistency checks."""
