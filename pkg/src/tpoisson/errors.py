"""Exception types shared across modules."""

from __future__ import annotations


class TPoissonError(Exception):
    """Base class for all package errors."""


class ValidationError(TPoissonError, ValueError):
    """Malformed or inconsistent input."""


class DimensionMismatch(ValidationError):
    pass


class NonDivisible(TPoissonError):
    """A term is not divisible by the requested coordinate."""

    def __init__(self, index: int, term):
        super().__init__(f"term {term} is not divisible by x{index}")
        self.index = index
        self.term = term


class NoValidIndex(TPoissonError):
    """The weight contributes to cohomology, so the homotopy does not apply."""

    def __init__(self, weight):
        super().__init__(f"no homotopy index for weight {weight}")
        self.weight = weight


class CapExceeded(TPoissonError):
    """A bounded search hit its level cap before terminating."""

    def __init__(self, cap: int):
        super().__init__(f"search still open at level cap {cap}")
        self.cap = cap


class W1Violated(ValidationError):
    pass


class JacobiResidue(TPoissonError):
    """Internal consistency failure: a computed bivector is not Poisson."""


class IsotropicVector(ValidationError):
    pass


class NotSymmetrizable(ValidationError):
    pass


class NotDistinguished(ValidationError):
    pass


class NotFullRank(TPoissonError):
    pass
