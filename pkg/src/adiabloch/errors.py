"""Exception types shared across the package."""


class AdiablochError(Exception):
    """Base class for all package errors."""


class DegenerateInputError(AdiablochError):
    """Input vector has no usable direction (norm below tolerance)."""


class DegenerateSpectrumError(AdiablochError):
    """Spectral gap below tolerance; eigen-direction undefined."""


class InvalidConfigError(AdiablochError):
    """Integrator or experiment configuration failed validation."""


class NormDriftExceededError(AdiablochError):
    """State norm drifted past the configured limit (step too large)."""


class StepRejectionExhaustedError(AdiablochError):
    """Adaptive stepper could not find an acceptable step size."""


class TooFewSamplesError(AdiablochError):
    """Operation needs more trajectory samples than provided."""


class RotationRegimeError(AdiablochError):
    """Drive rotates at least as fast as the gap; libration analysis invalid."""


class AntipodalWaypointsError(AdiablochError):
    """Consecutive waypoints are antipodal; connecting geodesic ambiguous."""


class NumericalInconsistencyError(AdiablochError):
    """A quantity left its mathematically allowed range by more than roundoff."""


class OracleMismatchError(AdiablochError):
    """Projected and full-state integrations disagree beyond tolerance."""


class MissingTrajectoryError(AdiablochError):
    """Referenced trajectory file does not exist."""
