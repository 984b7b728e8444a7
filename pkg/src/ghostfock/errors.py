"""Exception types shared across the package."""


class GhostFockError(Exception):
    """Base class for all package errors."""


class TruncationOverflow(GhostFockError):
    """Probability mass pushed past the Fock cutoff exceeds the leak tolerance."""


class BadParams(GhostFockError, ValueError):
    pass


class NullStateError(GhostFockError):
    """Raised when a zero vector has to be normalized."""


class DegenerateHerald(GhostFockError):
    pass


class DegenerateState(GhostFockError):
    """The operated state has zero norm (no photon to subtract, nothing added)."""


class DegenerateStatistics(GhostFockError):
    """Photon numbers are deterministic, so the SNR denominator vanishes."""


class NoTransition(GhostFockError):
    pass
