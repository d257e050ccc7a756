"""Exception types shared across the package."""


class TunnelwellError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(TunnelwellError):
    """Invalid configuration file or inconsistent parameter set."""


class SpectrumError(TunnelwellError):
    """Root finding failed to deliver the requested spectrum.

    Carries ``found`` (number of levels actually located) when the failure
    is a shortfall, so callers can report partial progress.
    """

    def __init__(self, message: str, found: int | None = None):
        super().__init__(message)
        self.found = found


class ProjectionError(TunnelwellError):
    """Packet expansion captured too little of the initial state."""


class ConsistencyError(TunnelwellError):
    """An internal cross-check failed (e.g. non-real probability)."""
