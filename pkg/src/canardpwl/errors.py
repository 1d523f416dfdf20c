"""Exception hierarchy shared by all modules."""


class CanardError(Exception):
    """Base class for every error raised by canardpwl."""


class InvalidParameterError(CanardError, ValueError):
    pass


class UnsupportedFormError(CanardError):
    """The system does not match the template an operation expects."""


class NotOnCriticalCurveError(CanardError):
    pass


class ContactPointError(CanardError):
    """Slow vector field requested at a non-removable contact point."""


class DomainError(CanardError):
    """No root could be bracketed (point outside the canard domain)."""


class PreconditionFailed(CanardError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class QuadratureError(CanardError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class StiffnessError(CanardError):
    """Step size underflow in the explicit integrator."""


class NoReturnError(CanardError):
    """Trajectory did not come back to the Poincare section."""
