"""Exception hierarchy.

The three top-level families map onto the CLI exit codes: parse (2),
validation (3) and numerical (4).
"""


class AveragednessError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(AveragednessError, ValueError):
    """An object or request violates a structural invariant."""


class DimensionMismatch(ValidationError):
    pass


class NotNonexpansive(ValidationError):
    pass


class DegeneratePair(ValidationError):
    pass


class FixSetMismatch(ValidationError):
    pass


class UnsupportedFunction(ValidationError):
    """The requested quantity has no closed form for this catalog variant."""


class SetValuedError(ValidationError):
    """Pointwise evaluation requested for a set-valued operator."""


class NumericalError(AveragednessError, ArithmeticError):
    """A numerical procedure failed to deliver its contract."""


class NonConvergence(NumericalError):
    pass


class MaxIterExceeded(NonConvergence):
    pass


class NotNormallyNonexpansive(NumericalError):
    pass


class DegenerateOperator(NumericalError):
    pass


class AllPairsDegenerate(NumericalError):
    pass


class ViolationFound(NumericalError):
    """A sampled pair contradicts a claimed bound; ``witness`` holds it."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(AveragednessError):
    """A request document could not be parsed; ``path`` locates the problem."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
