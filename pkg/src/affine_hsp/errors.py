"""Exception types raised across the package."""


class AffineHSPError(Exception):
    """Base class for all errors raised by this package."""


class NotPrimeError(AffineHSPError, ValueError):
    pass


class InvalidDegreeError(AffineHSPError, ValueError):
    pass


class FieldTooLargeError(AffineHSPError, ValueError):
    pass


class DivisionByZeroError(AffineHSPError, ZeroDivisionError):
    pass


class LogOfZeroError(AffineHSPError, ZeroDivisionError):
    pass


class UnknownLabelError(AffineHSPError, KeyError):
    pass


class DimensionMismatchError(AffineHSPError, ValueError):
    pass


class DimensionTooLargeError(AffineHSPError, ValueError):
    pass


class NonUnitaryError(AffineHSPError, ValueError):
    pass


class NormalizationError(AffineHSPError, ValueError):
    pass


class NotInvertibleError(AffineHSPError, ValueError):
    pass


class IndexOutOfRangeError(AffineHSPError, IndexError):
    pass


class DomainError(AffineHSPError, ValueError):
    pass


class ScanOverflowError(AffineHSPError, OverflowError):
    pass


class PhaseOracleFailed(AffineHSPError):
    """The discrete-log phase subroutine measured a non-invertible ``m``.

    The register state is consumed by then; ``trace`` and ``state`` are kept
    for diagnostics only.
    """

    def __init__(self, message, trace=None, state=None):
        super().__init__(message)
        self.trace = trace
        self.state = state
