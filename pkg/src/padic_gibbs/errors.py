"""Exception types. The class name is the error name reported by the CLI."""


class PadicGibbsError(Exception):
    """Base class for every named computational error in the package."""

    @property
    def name(self) -> str:
        return type(self).__name__


# arithmetic

class ZeroDenominator(PadicGibbsError, ZeroDivisionError):
    pass


class PrimeMismatch(PadicGibbsError, ValueError):
    pass


class DivisionByZeroToPrecision(PadicGibbsError, ZeroDivisionError):
    pass


class InsufficientPrecision(PadicGibbsError, ArithmeticError):
    pass


class NotASquare(PadicGibbsError, ValueError):
    """Raised by ``sqrt``; ``reason`` is one of OddValuation, NonResidue,
    TwoAdicObstruction."""

    def __init__(self, reason: str, message: str = ""):
        self.reason = reason
        super().__init__(message or reason)


class DomainError(PadicGibbsError, ValueError):
    pass


# residues

class ZeroResidue(PadicGibbsError, ValueError):
    pass


class NonResidue(PadicGibbsError, ValueError):
    pass


# model

class ZeroCoupling(PadicGibbsError, ValueError):
    pass


class UnequalCouplings(PadicGibbsError, ValueError):
    pass


class DepthLimit(PadicGibbsError, ValueError):
    pass


class ModeUnavailable(PadicGibbsError, ValueError):
    pass


class DegeneratePartition(PadicGibbsError, ArithmeticError):
    pass


class DenominatorZeroToPrecision(PadicGibbsError, ZeroDivisionError):
    pass


class InconsistentField(PadicGibbsError, ValueError):
    pass


class DegenerateDiscriminant(PadicGibbsError, ArithmeticError):
    pass


class VerificationFailed(PadicGibbsError):
    pass


class InternalInconsistency(PadicGibbsError, AssertionError):
    """A constructive count disagrees with a theorem-level count."""
