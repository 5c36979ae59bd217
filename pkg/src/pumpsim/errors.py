"""Exception types shared across the package.

The CLI maps these onto its stable exit codes; library users can catch
them individually.
"""


class PumpsimError(Exception):
    """Base class for all package errors."""


class ValidationError(PumpsimError, ValueError):
    """An input value violates a documented precondition."""


class ConfigError(PumpsimError):
    """Configuration file is missing, malformed, or fails schema checks."""


class NotCalibratedError(PumpsimError):
    """A calibrated parameter set is required but has not been fitted."""


class DataFormatError(PumpsimError):
    """An ingested data file violates its wire format contract.

    ``line`` is the 1-based line number of the first offending record
    when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ProtocolViolationError(PumpsimError):
    """The driving protocol leaves both valve chambers unsealed.

    ``time`` is the first violating instant in seconds.
    """

    def __init__(self, message, time=None):
        self.time = time
        super().__init__(message)


class CalibrationError(PumpsimError):
    """Calibration cannot reproduce the supplied anchors.

    ``residuals`` maps anchor labels to (target, achieved) pairs.
    """

    def __init__(self, message, residuals=None):
        self.residuals = dict(residuals or {})
        super().__init__(message)


class NumericalError(PumpsimError):
    """A linear system or iteration failed for numerical reasons."""
