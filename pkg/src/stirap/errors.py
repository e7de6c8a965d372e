"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for inputs that break
a precondition (nothing was computed), and :class:`NumericalError` for runs
that started but produced an untrustworthy result. The CLI maps them to exit
codes 1 and 2.
"""


class StirapError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(StirapError, ValueError):
    pass


class NumericalError(StirapError, ArithmeticError):
    pass


class InvalidParameter(ValidationError):
    pass


class InvalidRange(ValidationError):
    pass


class SchemeInvariantViolation(ValidationError):
    pass


class AngleUndefined(ValidationError):
    pass


class DegenerateResonance(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NormViolation(ValidationError):
    pass


class HadamardNormViolation(ValidationError):
    pass


class DegeneratePoint(ValidationError):
    pass


class AmbiguousProjection(ValidationError):
    pass


class WindowOverlap(ValidationError):
    pass


class PhaseIllDefined(ValidationError):
    pass


class AreaNotConverged(NumericalError):
    pass


class NormDriftExceeded(NumericalError):
    pass


class OverlapVanished(NumericalError):
    pass


class PacketClipped(NumericalError):
    pass
