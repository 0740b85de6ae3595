"""Exception hierarchy shared by every cuspmink module."""


class CuspminkError(Exception):
    """Base class for all library errors."""


class ConfigError(CuspminkError, ValueError):
    """Malformed field configuration (unknown keys, wrong types)."""


class NotTotallyReal(ConfigError):
    pass


class Reducible(ConfigError):
    pass


class MissingData(ConfigError):
    pass


class BadBasis(ConfigError):
    pass


class BadUnits(ConfigError):
    pass


class DivisionByZero(CuspminkError, ZeroDivisionError):
    pass


class ZeroInput(CuspminkError, ValueError):
    pass


class PrecisionExhausted(CuspminkError, ArithmeticError):
    pass


class ZeroIdeal(CuspminkError, ValueError):
    pass


class IndexDivisorPrime(CuspminkError, ValueError):
    pass


class CuspAtPoint(CuspminkError, ArithmeticError):
    pass


class NotOrientationPreserving(CuspminkError, ValueError):
    pass


class NoSolution(CuspminkError, ArithmeticError):
    pass


class NotOnBoundary(CuspminkError, ValueError):
    pass


class BudgetExceeded(CuspminkError, RuntimeError):
    """Enumeration node limit hit before certification.

    ``partial`` carries the best-so-far result when one is available.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
