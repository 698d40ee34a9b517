"""Exception hierarchy shared by all gapsolve modules."""


class GapSolveError(Exception):
    """Base class for every error raised by gapsolve."""


class InvalidConfig(GapSolveError, ValueError):
    """A user-supplied configuration is malformed or out of range."""


class DimensionMismatch(GapSolveError, ValueError):
    pass


class ZeroVector(GapSolveError, ValueError):
    pass


class NotPositiveDefinite(GapSolveError, ArithmeticError):
    """Cholesky met a pivot at or below the pivot tolerance."""


class ShiftBelowLambda0(NotPositiveDefinite):
    """The shift E does not lie strictly above lambda0 (E*Sm - Amm is not SPD)."""


class KTooLarge(GapSolveError, ValueError):
    pass


class NoGap(GapSolveError):
    """The level l_k(E) is negative for every tested E > lambda0."""


class SingularShift(GapSolveError, ArithmeticError):
    pass


class QuadratureFailure(GapSolveError, ArithmeticError):
    pass


class DegenerateSplit(GapSolveError, ArithmeticError):
    """A free discrete eigenvalue fell inside the gap (-1, 1)."""


class InvalidQuantumNumbers(GapSolveError, ValueError):
    pass
