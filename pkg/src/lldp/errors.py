"""Exception hierarchy shared by the integrators and the benchmark harness."""


class LLDPError(Exception):
    """Base class for every error raised by this package."""


class UsageError(LLDPError, ValueError):
    """Bad arguments: shape mismatch, unknown problem name, theta out of range."""


class ComputationError(LLDPError, ArithmeticError):
    """A numerical evaluation produced a non-finite or unusable result."""


class PadeFailure(ComputationError):
    """The Pade approximant of a matrix exponential could not be formed."""


class StepComputationError(ComputationError):
    """A single RK step could not be completed; the step must be rejected."""


class IntegrationFailure(LLDPError):
    """The adaptive loop could not reach the end of the interval.

    Attributes
    ----------
    t : float
        Time of the last accepted mesh point.
    error : float
        Scaled error of the last rejected attempt.
    """

    def __init__(self, message, t=float("nan"), error=float("nan")):
        super().__init__(message)
        self.t = t
        self.error = error


class ReferenceFailure(LLDPError):
    """The two independent reference integrations disagree."""
