"""Exception types shared across the package."""


class GptPurityError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(GptPurityError, ValueError):
    """A builder was asked for a dimension outside its valid range."""


class NormalizationError(GptPurityError, ValueError):
    """A vector expected to be a normalized state is not."""


class ConeError(GptPurityError, ValueError):
    """A vector fails the cone (positivity) test of its space."""


class RangeError(GptPurityError, ValueError):
    """A numeric argument lies outside its documented range."""


class ReducibleSpaceError(GptPurityError):
    """The group action fails the irreducibility diagnostic."""


class UnsupportedSpaceError(GptPurityError, ValueError):
    """The requested operation is not defined for this space kind."""


class UnsupportedCompositeError(GptPurityError, ValueError):
    """The requested pair of spaces has no supported tensor composite."""


class DegenerateDirectionError(GptPurityError, ValueError):
    """A direction vector is (numerically) zero."""


class DegenerateCompositeError(GptPurityError, ValueError):
    """A composite-dependent denominator is zero or negative."""


class UndefinedRatioError(GptPurityError, ValueError):
    """A ratio is undefined because its denominator vanishes."""


class InconsistencyError(GptPurityError):
    """Two routes to the same quantity disagree beyond tolerance."""


class EmptyFaceError(GptPurityError, ValueError):
    """The requested face contains no states."""


class InvalidProbeError(GptPurityError, ValueError):
    """A probe matrix violates its trace normalization conditions."""


class InternalError(GptPurityError):
    """An internal self-check failed; indicates a bug, not bad input."""
