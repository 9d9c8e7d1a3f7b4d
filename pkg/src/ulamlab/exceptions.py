"""Exception hierarchy shared across the package."""


class UlamLabError(Exception):
    """Base class for all errors raised by ulamlab."""


class ConfigError(UlamLabError, ValueError):
    """Invalid parameters: bad scale integer, degree out of range, unknown keys."""


class StructuralError(UlamLabError, ValueError):
    """Objects that do not fit together, e.g. a dimension mismatch."""


class UnsupportedOperation(StructuralError):
    """The operation has no canonical meaning for the given algebra."""
