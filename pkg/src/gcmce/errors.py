"""Exception hierarchy shared by all modules.

Every domain error derives from :class:`GcmError` so the command line can map
it to exit status 1 and a JSON error object.
"""


class GcmError(Exception):
    """Base class for domain errors."""


class NotPrimePower(GcmError, ValueError):
    pass


class DegreeTooLarge(GcmError, ValueError):
    pass


class BasisRankDeficient(GcmError, ValueError):
    pass


class NoSolution(GcmError):
    pass


class NonUnique(GcmError):
    """The linear system is consistent but has more than one solution.

    ``solution`` holds one particular solution and ``kernel`` a basis of the
    homogeneous solution space, so callers may still use them.
    """

    def __init__(self, message, solution=None, kernel=None):
        super().__init__(message)
        self.solution = solution
        self.kernel = kernel


class EnumerationTooLarge(GcmError):
    pass


class ParametersInfeasible(GcmError, ValueError):
    pass


class GivesUpAfterMaxTries(GcmError):
    pass


class DimensionMismatch(GcmError, ValueError):
    pass


class ThetaNotInjective(GcmError, ValueError):
    pass


class FieldMismatch(GcmError, ValueError):
    pass


class NotApplicable(GcmError):
    pass


class ErrorBudgetTooLarge(GcmError, ValueError):
    pass


class DecodeFailure(GcmError):
    pass


class MaxItersExceeded(GcmError):
    pass


class InsufficientWords(GcmError):
    pass


class AmbiguousSignatures(GcmError):
    pass


class SignatureMismatch(GcmError):
    """Some block has no position whose signature matches the reference block."""


class RankDeficientBlock(GcmError):
    pass


class TooFewCleanBlocks(GcmError):
    pass


class InfeasibleParameters(GcmError, ValueError):
    pass


class FormatError(GcmError, ValueError):
    pass
