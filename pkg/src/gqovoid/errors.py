"""Exception hierarchy shared by every module of the package."""


class GQError(Exception):
    """Base class for all errors raised by gqovoid."""


# finite fields
class NonPrimeCharacteristic(GQError, ValueError):
    pass


class DegreeOutOfRange(GQError, ValueError):
    pass


class DivisionByZero(GQError, ZeroDivisionError):
    pass


class OddExtensionDegree(GQError, ValueError):
    pass


# projective space
class ZeroVector(GQError, ValueError):
    pass


class IdenticalPoints(GQError, ValueError):
    pass


# incidence structures
class InconsistentCounts(GQError, ValueError):
    pass


class DuplicatePointOnLine(GQError, ValueError):
    pass


class IndexOutOfRange(GQError, IndexError):
    pass


class EmptySetForPerp(GQError, ValueError):
    pass


class ExhaustiveTooLarge(GQError, ValueError):
    pass


class AxiomFailure(GQError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class GQIFormatError(GQError, ValueError):
    """Malformed or inconsistent GQI v1 input."""


# classical constructions
class NotPrimePower(GQError, ValueError):
    pass


class TooLarge(GQError, ValueError):
    pass


class WrongGeometry(GQError, ValueError):
    pass


# ovoids
class InvalidProbability(GQError, ValueError):
    pass


class UndefinedLog(GQError, ValueError):
    pass


class NotPartialOvoid(GQError, ValueError):
    pass


class NoUncoveredNeighbor(GQError):
    """Every neighbour of x is already covered by S; the second round cannot start."""


class RunFailed(GQError):
    """All attempts failed and the failure policy is ``fail``.

    The last attempt is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
