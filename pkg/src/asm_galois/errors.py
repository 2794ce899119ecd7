"""Exception hierarchy shared by all modules."""


class AsmGaloisError(Exception):
    """Base class for every error raised by this package."""


# finite fields

class NonPrime(AsmGaloisError, ValueError):
    pass


class DegreeOutOfRange(AsmGaloisError, ValueError):
    pass


class DivisionByZero(AsmGaloisError, ZeroDivisionError):
    pass


class ContextMismatch(AsmGaloisError, TypeError):
    pass


class BadBase(AsmGaloisError, ValueError):
    pass


class ZeroPolynomial(AsmGaloisError, ValueError):
    pass


# geometry

class CoincidentPoints(AsmGaloisError, ValueError):
    pass


class DegenerateSubspace(AsmGaloisError, ValueError):
    """Linear data does not span the expected dimension."""


# curve

class DegenerateConstraint(AsmGaloisError, ValueError):
    pass


class PrecisionTooSmall(AsmGaloisError, ValueError):
    pass


class NotOnHyperplane(AsmGaloisError, ValueError):
    pass


class PrecisionExhausted(AsmGaloisError, ArithmeticError):
    pass


class ExtensionBoundExceeded(AsmGaloisError, ArithmeticError):
    """Some intersection points live beyond the searched extensions.

    ``found`` is the multiplicity located explicitly, ``expected`` the total
    fixed by degree accounting.
    """

    def __init__(self, message: str, found: int = 0, expected: int = 0):
        super().__init__(message)
        self.found = found
        self.expected = expected


# groups / projections

class NotClosed(AsmGaloisError, ValueError):
    pass


class UnknownClass(AsmGaloisError, KeyError):
    pass


class BaseOnBranchTooSmallField(AsmGaloisError, ArithmeticError):
    pass


# verification failures (process-level)

class VerdictFailure(AsmGaloisError):
    pass


class CountMismatch(VerdictFailure):
    pass


class FalsePositive(VerdictFailure):
    pass
