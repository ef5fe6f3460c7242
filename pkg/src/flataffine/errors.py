"""Exception hierarchy shared by all modules."""


class FlatAffineError(Exception):
    """Base class for every error raised by this package."""


class ParseError(FlatAffineError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")


class SchemaError(FlatAffineError, ValueError):
    pass


class MissingParam(FlatAffineError, KeyError):
    pass


class DivisionByZeroAtPoint(FlatAffineError, ZeroDivisionError):
    pass


class UndecidableSign(FlatAffineError):
    pass


class DimensionMismatch(FlatAffineError, ValueError):
    pass


class IndexOutOfRange(FlatAffineError, IndexError):
    pass


class CompositionOutsideAlgebra(FlatAffineError):
    """A composition or inverse would leave the exponential-polynomial algebra."""


class WeightParameterConflict(CompositionOutsideAlgebra):
    """An exponential term met a substitution it cannot absorb exactly."""


class NotFlatAffine(FlatAffineError):
    pass


class NotAffineField(FlatAffineError, ValueError):
    pass


class ClosureViolation(FlatAffineError):
    pass


class UnknownSurface(FlatAffineError, KeyError):
    pass


class NotReductive(FlatAffineError):
    pass


class PointOutsideDomain(FlatAffineError, ValueError):
    pass


class EvaluatorDomainError(FlatAffineError, ValueError):
    pass
