"""
Exception hierarchy for ptomit.

Every error carries a human readable ``detail`` and the process ``exit_code``
the CLI should return, the same status/detail pairing the HTTP layer used.
"""
from typing import Optional


class PtomitError(Exception):
    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class UsageError(PtomitError):
    exit_code = 2


class InvalidParameterError(PtomitError):
    """A physical parameter is outside its allowed range"""
    exit_code = 2

    def __init__(self, field: str, value: object, reason: str = "must be positive"):
        super().__init__(f"Invalid parameter '{field}' = {value!r}: {reason}")
        self.field = field
        self.value = value


class PhysicsError(PtomitError):
    """Base for failures of the model at a given parameter point"""
    exit_code = 3


class LasingThresholdError(PhysicsError):
    """The linear steady state does not exist (gain saturates)"""


class ResponseSingularityError(PhysicsError):
    def __init__(self, detail: str, delta_p: Optional[float] = None):
        super().__init__(detail)
        self.delta_p = delta_p


class DelayDerivativeUnstableError(PhysicsError):
    """The phase derivative does not settle (phase discontinuity at the point)"""


class ApproximationPoleError(PhysicsError):
    """J^2 = kappa*gamma exactly: the asymptotic transmission formula diverges"""


class NotConvergedError(PhysicsError):
    """The time-domain trajectory has not reached steady oscillation"""


class InstabilityError(PhysicsError):
    def __init__(self, detail: str, time: Optional[float] = None):
        super().__init__(detail)
        self.time = time


class SteadyStateInternalError(PtomitError):
    """No admissible root found; indicates a bug rather than a physics limit"""
    exit_code = 1
