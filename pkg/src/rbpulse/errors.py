"""Exception and warning types raised by rbpulse."""


class RbPulseError(ValueError):
    """Base class for all rbpulse errors."""


class ResolutionError(RbPulseError):
    """Time grid too coarse or too short for the requested operation."""


class MetrologyError(RbPulseError):
    """A width could not be measured (no half-maximum crossing)."""


class WindowingError(RbPulseError):
    """The analysis window truncates the pulse."""


class DomainError(RbPulseError):
    """Argument outside the mathematical domain of an operation."""


class ThermalShutdownError(RbPulseError):
    """Amplifier average input power above the device protection threshold."""


class ExtrapolationWarning(UserWarning):
    """Laser operating point outside the linear tuning window."""


class SaturationWarning(UserWarning):
    """Frequency-doubling model used beyond its undepleted-pump validity."""


class CoverageWarning(UserWarning):
    """Trajectory ends before the excited state has decayed."""
