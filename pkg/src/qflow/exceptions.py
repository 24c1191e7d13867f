"""Exception types raised across the package."""


class QflowError(Exception):
    """Base class for all package errors."""


class FormatError(QflowError, ValueError):
    """A bit vector does not match the fixed-point format it is decoded with."""


class EncodingRangeError(QflowError, ValueError):
    """A real value lies outside the range of a fixed-point format."""


class ConfigurationError(QflowError, ValueError):
    """Invalid flow, sampler or run parameters."""


class SingularSystemError(QflowError, ArithmeticError):
    """A zero pivot was met during tridiagonal elimination."""


class CapacityError(QflowError, ValueError):
    """A problem is too large for the requested backend."""
