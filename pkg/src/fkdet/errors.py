"""Exception hierarchy shared by all modules."""


class FKError(Exception):
    """Base class for every error raised by fkdet."""


class NumericFailure(FKError):
    """A numerical gate rejected the input (singular, non-convergent, ...)."""


class NotHermitian(FKError, ValueError):
    pass


class NotUnitary(FKError, ValueError):
    pass


class NotIdempotent(FKError, ValueError):
    pass


class DomainError(FKError, ValueError):
    """A scalar function was applied outside of its domain."""


class ShapeMismatch(FKError, ValueError):
    pass


class PairMismatch(FKError, ValueError):
    """Operands live over different tracial pairs."""


class SupportViolation(FKError, ValueError):
    """An element that must be supported on the finite-trace blocks is not."""


class OutOfRange(FKError, ValueError):
    pass


class NotALoop(FKError, ValueError):
    pass


class Singular(NumericFailure):
    pass


class NoConvergence(NumericFailure):
    pass


class QuadratureFailure(NumericFailure):
    pass
