"""Exception types raised by rankbound."""


class RankboundError(Exception):
    """Base class for all rankbound errors."""


class InvalidInput(RankboundError, ValueError):
    """Malformed matrix, dimension mismatch or inconsistent specification."""


class ConvergenceFailure(RankboundError):
    """An iterative projection hit its iteration cap.

    The best iterate and its residuals are attached so callers can decide
    whether the result is still usable.
    """

    def __init__(self, message, best=None, residuals=None):
        super().__init__(message)
        self.best = best
        self.residuals = residuals or {}


class NumericalFailure(RankboundError):
    """Non-finite values appeared inside an iteration."""


class MissingConstant(RankboundError):
    """A bound needs a user-supplied constant (theta, M) that was not given."""


class Unsupported(RankboundError):
    """Instance lies outside what the brute-force oracle can enumerate."""
