"""Exception types. Names mirror the failure they signal."""


class WengError(Exception):
    """Base class."""


class InvalidSpec(WengError, ValueError):
    pass


class CapExceeded(WengError):
    def __init__(self, order: int, cap: int):
        super().__init__(f"Weyl group order {order} exceeds cap {cap}")
        self.order = order
        self.cap = cap


class NotInFrakWp(WengError, ValueError):
    pass


class InternalInconsistency(WengError):
    """A computed identity failed; indicates a construction bug."""


class DecompositionNotFound(InternalInconsistency):
    pass


class NoExtremalRoot(InternalInconsistency):
    pass


class NotCleared(InternalInconsistency):
    pass


class DivisionNotExact(InternalInconsistency):
    pass


class IndexSetMismatch(InternalInconsistency):
    pass


class NumericError(WengError, ArithmeticError):
    pass


class PoleAtOne(NumericError):
    pass


class PoleAtNonpositiveInteger(NumericError):
    pass


class PoleAtZeroOrOne(NumericError):
    pass


class NearPole(NumericError):
    pass


class NotRealOnLine(InternalInconsistency):
    pass


class ContourTooClose(NumericError):
    pass
