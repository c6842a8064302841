"""Exception types raised across the package."""


class RwmhError(Exception):
    pass


class NonIntegrable(RwmhError):
    pass


class DimensionMismatch(RwmhError):
    pass


class UnsupportedSampler(RwmhError):
    pass


class UnsupportedQuery(RwmhError):
    """The requested quantity has no implemented route for this distribution."""


class DegeneratePath(RwmhError):
    pass


class ToleranceNotMet(RwmhError):
    pass


class NotSymmetric(RwmhError):
    pass


class PreconditionFailed(RwmhError):
    pass


class ZeroVector(RwmhError):
    pass


class BothZero(RwmhError):
    pass


class OutOfRange(RwmhError):
    pass


class RangeError(RwmhError):
    pass


class ClassificationFailure(RwmhError):
    pass


class MassError(RwmhError):
    pass


class SupportMismatch(RwmhError):
    pass


class NotReversible(RwmhError):
    pass


class PatternViolation(RwmhError):
    pass


class ConfigError(RwmhError):
    pass
