"""Exception hierarchy shared by all modules."""


class FlowBCHError(Exception):
    """Base class for all errors raised by this package."""


class AlgebraMismatchError(FlowBCHError, ValueError):
    """Two operands belong to different algebras."""

    def __init__(self, left, right):
        super().__init__(f"algebra mismatch: {left} vs {right}")


class NotContactElementError(FlowBCHError, ValueError):
    pass


class NumericDomainError(FlowBCHError, ArithmeticError):
    """A numerical value falls outside the domain where a formula is valid.

    The CLI maps every subclass to exit code 3.
    """


class BranchError(NumericDomainError):
    """The composed group element has no principal logarithm in the algebra."""


class ExponentialOverflowError(NumericDomainError):
    pass


class NonPrincipalLogError(NumericDomainError):
    pass


class NotInImageError(NumericDomainError):
    pass


class DivergentTrajectoryError(NumericDomainError):
    pass
