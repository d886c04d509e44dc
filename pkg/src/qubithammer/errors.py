"""Exception hierarchy shared by every module."""


class QubitHammerError(Exception):
    """Base class for all package errors."""


class DeviceValidationError(QubitHammerError, ValueError):
    """A device configuration violates one of its invariants."""


class ScheduleError(QubitHammerError, ValueError):
    """A pulse schedule is malformed (overlap, bad timing, bad envelope)."""


class IntegrationError(QubitHammerError, RuntimeError):
    """Time integration became unstable (NaN or trace drift)."""


class CalibrationError(QubitHammerError, ValueError):
    """Calibration input cannot be fitted (too few points, scan too short)."""


class InfeasibleScenarioError(QubitHammerError, ValueError):
    """No allocation satisfies the requested scenario geometry."""
