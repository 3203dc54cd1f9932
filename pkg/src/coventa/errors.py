"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""


class CoventaError(ValueError):
    pass


class NotHermitian(CoventaError):
    pass


class TraceNotOne(CoventaError):
    pass


class NotPositive(CoventaError):
    pass


class NormalizationError(CoventaError):
    pass


class DimensionMismatch(CoventaError):
    pass


class DimensionOutOfRange(CoventaError):
    pass


class NotPrime(CoventaError):
    pass


class MissingMubFamily(CoventaError):
    pass


class SimplexViolation(CoventaError):
    pass


class AlphaOutOfRange(CoventaError):
    pass


class UngroupableSet(CoventaError):
    pass


class StateFileError(CoventaError):
    """Raised for malformed state files; the message names the offending field."""
