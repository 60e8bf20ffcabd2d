"""Exception types raised by qshape.

Every domain error derives from :class:`ShapeError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class ShapeError(ValueError):
    """Base class for all domain errors."""


class DegenerateConfig(ShapeError):
    """All points of a configuration coincide."""


class TooFewPoints(ShapeError):
    """A configuration needs at least three points."""


class TooManyPoints(ShapeError):
    """Exhaustive permutation search refused (N > 10)."""


class DimensionMismatch(ShapeError):
    pass


class NotATriangle(ShapeError):
    pass


class IndexOutOfRange(ShapeError):
    pass


class ZeroVector(ShapeError):
    """A superposition whose coefficients all vanish."""


class EmptySupport(ShapeError):
    pass


class NotCyclic(ShapeError):
    """No common period exists for the populated energy levels."""


class NormLoss(ShapeError):
    """A diffusion step changed the norm by more than the allowed factor."""


class ParseError(ShapeError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
