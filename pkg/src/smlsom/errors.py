"""Exception hierarchy shared across the package."""


class SmlsomError(Exception):
    """Base class for package-specific failures."""


class DataError(SmlsomError):
    """Invalid or incompatible input data."""


class SingularModelError(SmlsomError):
    """Covariance factorization failed even after maximal jitter."""


class CalibrationError(SmlsomError):
    """Overlap calibration could not reach the requested target."""
