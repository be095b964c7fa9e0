"""Exception types shared across the package.

Most errors also derive from a matching builtin so callers can catch
``ValueError`` / ``IndexError`` without importing this module.
"""


class DssError(Exception):
    """Base class for every error raised by dsssync."""


class NonPrimeModulus(DssError, ValueError):
    pass


class ZeroInverse(DssError, ZeroDivisionError):
    pass


class MixedFields(DssError, ValueError):
    pass


class FieldTooSmall(DssError, ValueError):
    pass


class DuplicateNodes(DssError, ValueError):
    pass


class Singular(DssError, ValueError):
    pass


class RankDeficient(DssError, ValueError):
    pass


class IndexOutOfRange(DssError, IndexError):
    pass


class DimensionMismatch(DssError, ValueError):
    pass


class LengthMismatch(DssError, ValueError):
    pass


class BadSubsetSize(DssError, ValueError):
    pass


class NonUniformEdits(DssError, ValueError):
    pass


class NoPadSlack(DssError, ValueError):
    pass


class MissingValue(DssError, ValueError):
    pass


class EditMismatch(DssError, ValueError):
    """An edit's declared value disagrees with the user's block."""


class InfeasibleBudget(DssError, ValueError):
    pass


class NoCandidate(DssError, ValueError):
    pass


class AmbiguousRecovery(DssError, ValueError):
    pass


class TooManyAffected(DssError, ValueError):
    pass


class TooLarge(DssError, ValueError):
    pass


class NonConvergence(DssError, ArithmeticError):
    pass


class DemoMismatch(DssError, AssertionError):
    pass
