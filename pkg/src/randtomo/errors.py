"""Exception types shared across the package."""


class RandtomoError(Exception):
    """Base class for all randtomo errors."""


class NotSquareError(RandtomoError):
    """Matrix expected to be square is not."""


class NotHermitianError(RandtomoError):
    """Matrix violates the Hermiticity tolerance."""


class SingularMatrixError(RandtomoError):
    """Matrix is singular (or numerically singular) where invertibility is required."""


class InvalidDimensionError(RandtomoError):
    """Hilbert-space dimension or spin count outside the supported range."""


class LengthMismatchError(RandtomoError):
    """Vector length incompatible with the operator basis or matrix shape."""


class NotDensityError(RandtomoError):
    """Matrix is not density-shaped (non-Hermitian or trace far from one)."""


class DimensionMismatchError(RandtomoError):
    """Operators of incompatible dimensions were combined."""


class TimeOutOfRangeError(RandtomoError):
    """Requested propagation time lies outside the control field's support."""


class QuadratureError(RandtomoError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class TooFewSamplesError(RandtomoError):
    """Statistical test invoked with fewer samples than it supports."""


class PlateauNotFoundError(RandtomoError):
    """No plateau satisfying the detection rule exists in the trace window."""


class ConfigError(RandtomoError):
    """Invalid experiment configuration (bad value or unknown key)."""
