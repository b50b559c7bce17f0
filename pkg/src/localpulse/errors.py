"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class UnsupportedScheduleError(ValueError):
    """Raised when the closed-form propagator cannot handle a schedule.

    Overlapping pulses on different channels do not commute in general, so
    such schedules must go through :func:`localpulse.simulator.propagate_numeric`.
    """


class IntegrationError(RuntimeError):
    """Raised when numerical integration meets non-finite field values."""
