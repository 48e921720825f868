"""Exception types raised across the package."""


class HelicalNSError(Exception):
    """Base class for every error raised by helicalns."""


class GridMismatch(HelicalNSError, ValueError):
    pass


class NegativePowerOnMeanMode(HelicalNSError, ValueError):
    pass


class ZeroWavevector(HelicalNSError, ValueError):
    pass


class NotDivergenceFree(HelicalNSError, ValueError):
    pass


class EmptyShellRange(HelicalNSError, ValueError):
    pass


class CflViolation(HelicalNSError, ValueError):
    pass


class NonFinite(HelicalNSError, FloatingPointError):
    """The discrete system blew up; ``t_last`` is the last time with a finite state."""

    def __init__(self, message, t_last, trajectory=None):
        super().__init__(message)
        self.t_last = t_last
        self.trajectory = trajectory


class InsufficientRecords(HelicalNSError, ValueError):
    pass


class MissingProbeConstant(HelicalNSError, ValueError):
    pass


class InvalidC5(HelicalNSError, ValueError):
    pass


class BadMagic(HelicalNSError, OSError):
    pass


class SizeMismatch(HelicalNSError, OSError):
    pass


class BadHeader(HelicalNSError, OSError):
    """The header parses but describes an impossible grid."""


class ConfigError(HelicalNSError, ValueError):
    pass


class DivergenceWarning(UserWarning):
    """A stored field failed the divergence check and was re-projected."""
