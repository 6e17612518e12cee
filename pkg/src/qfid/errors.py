"""Exception hierarchy shared by every qfid module."""


class QfidError(Exception):
    """Base class for all library errors."""


class NotHermitian(QfidError):
    pass


class NotPsd(QfidError):
    pass


class DimMismatch(QfidError, ValueError):
    pass


class NotDensity(QfidError, ValueError):
    """Raised when a matrix fails the unit-trace or positivity checks of a state."""


class AncillaTooSmall(QfidError, ValueError):
    pass


class InvalidPovm(QfidError, ValueError):
    pass


class InvalidChannel(QfidError, ValueError):
    pass


class InvalidTruncation(QfidError, ValueError):
    pass


class InvalidParameter(QfidError, ValueError):
    pass


class NoConvergence(QfidError, RuntimeError):
    pass


class SchemaError(QfidError, ValueError):
    """Malformed JSON input; the message carries the file path and field."""
