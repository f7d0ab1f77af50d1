"""Exception types shared across the package."""


class AnisoperimError(Exception):
    """Base class for all package errors."""


class InvalidInputError(AnisoperimError):
    """Non-finite or otherwise malformed numeric input."""


class ConfigurationError(AnisoperimError):
    """Parameter outside its documented range (resolution, exponent, sample count)."""


class SingularPointError(AnisoperimError):
    """Derivative of a gauge requested at the origin, where it does not exist."""


class SingularGradientError(AnisoperimError):
    """Operator evaluated where the field gradient vanishes."""


class InvalidCurveError(AnisoperimError):
    """Polygon fails convexity / orientation / degeneracy requirements."""


class DomainError(AnisoperimError):
    """Point or parameter outside the domain of definition."""


class StencilError(AnisoperimError):
    """Finite-difference stencil does not fit (too close to the boundary)."""


class ConsistencyError(AnisoperimError):
    """Two independent formulas for the same quantity disagree beyond tolerance."""


class EmptyLevelError(AnisoperimError):
    """Level at or above the maximum of the field: the level set is empty."""


class ExtractionError(AnisoperimError):
    """Contour extraction produced no closed curve."""


class ProfileError(AnisoperimError):
    """Monotone table violated, or a profile misses required data."""


class InvalidDataError(AnisoperimError):
    """Data table violates a sign or monotonicity precondition."""


class ManufacturedSolutionError(AnisoperimError):
    """Manufactured right-hand side is not positive on a non-negligible set."""
