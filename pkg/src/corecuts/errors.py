"""Exception types shared across the package."""


class CorecutsError(Exception):
    """Base class for all package-specific errors."""


class SingularCirculant(CorecutsError):
    """The circulant matrix of the given vector is (numerically) singular."""


class LayerMismatch(CorecutsError):
    """Two vectors that must share a nonzero layer do not."""


class NonActiveMismatch(CorecutsError):
    """Non-active coordinates of a point differ from the reference vector."""


class OrbitCapExceeded(CorecutsError):
    """Orbit enumeration grew past the configured safety cap."""


class NotCore(CorecutsError):
    """A point required to be a core point is not one."""


class InputError(CorecutsError):
    """Malformed user input (files, CLI arguments, cycle strings)."""
