"""Exception types shared across the package."""


class CavityError(Exception):
    """Base class for all errors raised by cavnoise."""


class CoefficientError(CavityError, ValueError):
    """Malformed coefficient set: dimension mismatch, non-finite entry, bad rate."""


class FormatError(CavityError, ValueError):
    """A coefficient or scheme file does not follow the expected layout."""


class DomainError(CavityError, ArithmeticError):
    """A numeric operation is undefined for the given input."""


class NearSingularFeedbackError(DomainError):
    """The feedback loop of a replacement scheme is (nearly) self-oscillating."""


class UndefinedAngleError(DomainError):
    """The complex angle between two noise vectors is undefined (zero vector)."""


class StencilError(DomainError):
    """A finite-difference stencil point could not be evaluated."""

    def __init__(self, parameter: str, cause: Exception):
        super().__init__(f"stencil evaluation failed for parameter {parameter!r}: {cause}")
        self.parameter = parameter
        self.cause = cause


class ResourceBoundError(DomainError):
    """A requested discretization exceeds the supported size."""
