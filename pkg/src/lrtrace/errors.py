"""Exception hierarchy.

Input-domain problems derive from ``ValueError`` so callers that only care
about "bad argument" can catch that; resource guards derive from
``OverflowError`` / ``MemoryError``.
"""


class LRTraceError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LRTraceError, ValueError):
    """An argument lies outside the domain of the operation."""


class BranchCutError(DomainError):
    pass


class StripError(DomainError):
    """Argument outside the strip where the contour integral converges."""


class PoleError(DomainError):
    pass


class DegenerateInputError(DomainError):
    pass


class SingularityError(DomainError):
    pass


class ResidualError(DomainError):
    """A closed form or lift failed its self-consistency check."""


class WindingError(ResidualError):
    pass


class ThetaMismatchError(DomainError):
    """The puncture weight does not exponentiate to a0*b0*c0."""


class QuadratureError(LRTraceError, RuntimeError):
    pass


class MagnitudeOverflowError(LRTraceError, OverflowError):
    """A value would leave double range; use the log-domain variant."""


class ResourceGuardError(LRTraceError, MemoryError):
    pass
