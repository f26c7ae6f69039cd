"""Exception hierarchy.

Every error raised on bad input derives from :class:`SpacingsError`, itself a
``ValueError``, so callers can catch one class at the CLI boundary.
"""


class SpacingsError(ValueError):
    """Base class for all domain errors."""


class EmptyInput(SpacingsError):
    pass


class NonFiniteInput(SpacingsError):
    pass


class ValueOutOfUnitInterval(SpacingsError):
    """Observation not strictly inside (0, 1); apply the probability integral transform first."""


class UnsupportedFamily(SpacingsError):
    pass


class ValueOutOfSupport(SpacingsError):
    pass


class OrderTooLarge(SpacingsError):
    pass


class AlreadyScaled(SpacingsError):
    pass


class NotScaled(SpacingsError):
    pass


class NonpositiveExponent(SpacingsError):
    pass


class TooFewSpacings(SpacingsError):
    pass


class NonpositiveShape(SpacingsError):
    pass


class NonmonotoneAlternative(SpacingsError):
    pass


class OverlapOutOfRange(SpacingsError):
    pass


class InsufficientReps(SpacingsError):
    pass


class AnalyticUnavailable(SpacingsError):
    pass


class QuadratureFailure(SpacingsError):
    pass


class DegenerateVariance(SpacingsError):
    pass


class TableMismatch(SpacingsError):
    pass


class KernelSpecError(SpacingsError):
    pass


class AlternativeSpecError(SpacingsError):
    pass
