class GateUnivError(Exception):
    """Base class for all errors raised by gateuniv."""


class ResourceError(GateUnivError):
    """A requested computation exceeds the configured size limits."""


class InconclusiveError(GateUnivError):
    """A numerical procedure could not certify its answer.

    Raised instead of returning a count that might be wrong.
    """


class GateSetError(GateUnivError):
    """Malformed or invalid gate-set input."""


class UnsupportedError(GateUnivError):
    """The requested operation is not defined for these parameters."""
