"""Exception types raised across the package."""


class BCSCGError(Exception):
    """Base class for all package errors."""


class DegenerateReflection(BCSCGError):
    """The Householder reflector ``d - u`` is numerically zero."""


class BudgetExhausted(BCSCGError):
    """A true function evaluation was requested with no budget left.

    ``trial_set`` carries the (point, value) pairs gathered by the poll step
    before the budget ran out, when raised from inside a poll.
    """

    def __init__(self, message="evaluation budget exhausted", trial_set=None):
        super().__init__(message)
        self.trial_set = [] if trial_set is None else trial_set


class SingularSystem(BCSCGError):
    """Interpolation system is rank deficient beyond tolerance."""


class NotPoised(BCSCGError):
    """Sample set does not have full rank ``min(n, q)``."""


class DegenerateTheta(BCSCGError):
    """Scaling matrix undefined: zero step or step orthogonal to gradient."""


class InfeasibleStart(BCSCGError, ValueError):
    """Starting point lies outside the box."""


class InfeasibleBudget(BCSCGError, ValueError):
    """Evaluation budget is too small to run a single poll round."""


class UnknownProblem(BCSCGError, KeyError):
    """Problem name not present in the catalog."""


class IncompatibleDimension(BCSCGError, ValueError):
    """Problem does not admit the requested dimension."""


class MissingCell(BCSCGError, ValueError):
    """Run-record grid is incomplete or has duplicate cells."""
