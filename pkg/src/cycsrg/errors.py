"""Exception hierarchy.

Precondition failures (bad user input) map to CLI exit code 2, internal
consistency failures map to exit code 3.
"""


class CycsrgError(Exception):
    pass


class PreconditionError(CycsrgError, ValueError):
    pass


class NotPrime(PreconditionError):
    pass


class PolynomialReducible(PreconditionError):
    pass


class BudgetExceeded(PreconditionError):
    pass


class NotADivisor(PreconditionError):
    pass


class ZeroArgument(PreconditionError):
    pass


class EvenCharacteristic(PreconditionError):
    pass


class NotAPartition(PreconditionError):
    pass


class EvenModulus(PreconditionError):
    pass


class BaseNotOnConic(PreconditionError):
    pass


class NotThreeValued(PreconditionError):
    pass


class NotQualifying(PreconditionError):
    pass


class ConditionNotVerified(PreconditionError):
    pass


class CacheError(CycsrgError):
    pass


class NotRational(CycsrgError, ArithmeticError):
    """A character sum expected to be a rational integer is not."""

    def __init__(self, coeffs, message=None):
        self.coeffs = [int(c) for c in coeffs]
        super().__init__(message or f"not a rational integer: {self.coeffs}")


class InternalError(CycsrgError, RuntimeError):
    pass


class SizeFormulaMismatch(InternalError):
    pass


class DuplicateIndex(InternalError):
    pass
