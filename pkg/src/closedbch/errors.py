"""Exception hierarchy shared by all modules."""


class BCHError(Exception):
    """Base class for every error raised by closedbch."""


class PoleError(BCHError, ZeroDivisionError):
    """A kernel was evaluated on one of its genuine poles."""


class JacobiViolation(BCHError, ValueError):
    pass


class AmbiguousClassification(BCHError, ValueError):
    pass


class MissingParameter(BCHError, KeyError):
    pass


class ExtraneousParameter(BCHError, KeyError):
    pass


class DegenerateDivision(BCHError, ZeroDivisionError):
    """A constraint or solution formula divides by a vanishing quantity."""


# the solver-side name used for per-type alpha formulas
DegenerateDenominator = DegenerateDivision


class InadmissibleOnly(BCHError):
    """Every candidate alpha violates the v - alpha*u, w - beta*z exclusions."""


class UnsupportedShape(BCHError, ValueError):
    pass


class UnsupportedRatio(BCHError, ValueError):
    pass


class NoConvergence(BCHError, RuntimeError):
    pass


class NoIsolatedRoots(BCHError, ValueError):
    pass


class LimitUnstable(BCHError, RuntimeError):
    pass


class OrderOutOfRange(BCHError, ValueError):
    pass


class NotNearIdentity(BCHError, ValueError):
    pass


class RepSpecMismatch(BCHError, ValueError):
    pass
