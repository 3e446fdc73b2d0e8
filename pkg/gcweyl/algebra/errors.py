class GCWeylError(Exception):
    """Base class for every error raised by gcweyl"""


class ChartMismatch(GCWeylError, ValueError):
    pass


class EpsUnderflow(GCWeylError, ArithmeticError):
    """A term fell below the lowest admitted power of eps."""

    def __init__(self, eps, min_eps):
        super().__init__(f"eps^{eps} is below the truncation window (min_eps={min_eps})")
        self.eps = eps
        self.min_eps = min_eps


class DomainError(GCWeylError, ValueError):
    pass


class NotReducibleToJ(GCWeylError, ValueError):
    """The series is not a polynomial in J. ``residual`` holds what is left."""

    def __init__(self, residual):
        super().__init__("series is not a polynomial in J")
        self.residual = residual


class FieldPresent(GCWeylError, ValueError):
    pass


class ParseError(GCWeylError, ValueError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ChartMixing(ParseError):
    pass


class NegativePowerError(ParseError):
    pass


class DomainViolation(GCWeylError, ValueError):
    pass


class WordPresent(GCWeylError, ValueError):
    pass


class UndeterminedOrderWarning(Warning):
    pass
