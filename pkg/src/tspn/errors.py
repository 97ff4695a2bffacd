"""Exception types shared across the package."""


class TspnError(Exception):
    """Base class for all package errors."""


class UnboundedPolytope(TspnError):
    pass


class EmptyPolytope(TspnError):
    pass


class EmptyKeepSet(TspnError):
    pass


class ParseError(TspnError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionOutOfRange(TspnError):
    pass


class ZeroNormal(TspnError):
    pass


class BaseSetTooLarge(TspnError):
    pass


class TrivialBaseSet(TspnError):
    pass


class CapExceeded(TspnError):
    """Flagged when an enumeration stream is truncated; not fatal."""


class DegenerateConfiguration(TspnError):
    """The arc graph / token walk cannot certify this configuration."""


class NumericalFailure(TspnError):
    pass


class GuessMismatch(TspnError):
    pass


class DegenerateBody(TspnError):
    pass


class ContainmentViolation(TspnError):
    pass


class TooManyPoints(TspnError):
    pass


class Infeasible(TspnError):
    pass


class NoCandidateFound(TspnError):
    def __init__(self, message, counters=None):
        super().__init__(message)
        self.counters = counters


class FeasibilityAssertionError(TspnError):
    """A candidate tour failed the feasibility recheck (internal assertion)."""


class DimensionUnsupported(TspnError):
    pass
