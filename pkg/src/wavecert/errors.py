"""Exception types shared across the package."""


class WavecertError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(WavecertError):
    """A run configuration failed validation."""


class ConditionFailure(WavecertError):
    """An admissibility condition required by an operation does not hold."""


class InfeasiblePlanError(WavecertError):
    """No truncation plan can meet the requested error/confidence target."""


class FactorizationError(WavecertError):
    """A joint covariance could not be factorized within the jitter cap."""
