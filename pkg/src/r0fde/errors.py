"""Exception hierarchy shared by all r0fde modules."""


class R0FdeError(Exception):
    """Base class for every error raised by this package."""


class NonConvergence(R0FdeError):
    """An iterative solver hit its iteration cap."""


class NoConvergence(NonConvergence):
    """Power iteration did not settle; ``bracket`` holds the last (low, high) ratio bounds."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class NotMetzler(R0FdeError):
    pass


class Singular(R0FdeError):
    pass


class DelayExceedsHistory(R0FdeError):
    pass


class Overflow(R0FdeError):
    """exp(-lambda * tau) left the float range; narrow the bracket."""


class NotCooperative(R0FdeError):
    pass


class BracketFailure(R0FdeError):
    pass


class BlowUp(R0FdeError):
    pass


class NotStable(R0FdeError):
    pass


class ZeroR0(R0FdeError):
    pass


class HorizonExceeded(R0FdeError):
    """Threshold trials still moving at the horizon cap; ``report`` holds the partial verdicts."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class AssumptionViolated(R0FdeError):
    """A next-generation model failed validation.

    ``which`` is one of ``"A1"``, ``"A2-cooperative"``, ``"A2-stability"``
    or ``"dimension"``.
    """

    def __init__(self, which, message=None):
        super().__init__(message or f"assumption {which} violated")
        self.which = which


class SpecError(R0FdeError):
    """Malformed model-spec file (JSON syntax or schema)."""
