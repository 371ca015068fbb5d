"""Exception types shared across the package."""


class DeaMpssError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DeaMpssError):
    """Malformed input: bad problem dimensions, bad files, bad data values."""


class UnsupportedTopologyError(ValidationError):
    """Topology shape outside the two supported network layouts."""


class SolverError(DeaMpssError):
    """A linear program failed in a way valid inputs should never produce."""
