"""Exception hierarchy shared across the package."""


class LegendreRankError(Exception):
    """Base class for every error raised by this package."""


class BudgetExceeded(LegendreRankError):
    """Factorization gave up; ``cofactor`` is the part left unfactored."""

    def __init__(self, cofactor, message=None):
        self.cofactor = cofactor
        super().__init__(message or f"factorization budget exceeded; unfactored cofactor {cofactor}")


class SingularCurveError(LegendreRankError, ValueError):
    """The Weierstrass data has zero discriminant."""


class SingularFibre(SingularCurveError):
    """A fibre of a family sits over a point of the singular locus."""


class NotMultiplicative(LegendreRankError, ValueError):
    pass


class AdditiveUnsupported(LegendreRankError, ValueError):
    """Local root numbers at additive places are not implemented."""


class NoTwoTorsion(LegendreRankError, ValueError):
    pass


class LocalUndecided(LegendreRankError, RuntimeError):
    """A p-adic solubility search ran past its depth guard (should be unreachable)."""

    def __init__(self, p, d):
        self.p = p
        self.d = d
        super().__init__(f"local solubility at p={p} undecided for class {d}")


class InconsistentData(LegendreRankError, AssertionError):
    """Internal bookkeeping produced an impossible value."""


class PreconditionFailed(LegendreRankError, ValueError):
    pass


class CompositeExponent(PreconditionFailed):
    pass


class AssertionFailed(LegendreRankError, AssertionError):
    """A computed value contradicts the expected theorem statement."""
