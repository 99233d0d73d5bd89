"""Exception types shared across the package."""


class ExpWidthError(Exception):
    """Base class for all errors raised by expwidth."""


class ZeroScalarError(ExpWidthError, ValueError):
    pass


class ContainmentError(ExpWidthError, ValueError):
    """Raised by difference(Z, W) when W is not contained in Z."""


class InvalidHalfAngle(ExpWidthError, ValueError):
    pass


class InvalidInterval(ExpWidthError, ValueError):
    pass


class HorizonExceeded(ExpWidthError, ValueError):
    """A measure was requested past the radius within which a distribution is known."""


class InsufficientGrid(ExpWidthError, ValueError):
    """The radial grid is too short to estimate a limit."""


class InfiniteMultiplicity(ExpWidthError, ValueError):
    pass


class HypothesisViolation(ExpWidthError):
    """A criterion was applied to a distribution outside its hypotheses.

    The CLI maps this to exit code 2.
    """
