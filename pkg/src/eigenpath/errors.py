"""Exception hierarchy for the eigenpath library.

Argument errors (bad shapes, out-of-range parameters) raise plain
``ValueError``; everything that can go wrong *numerically* derives from
:class:`EigenpathError` so callers can map failures to exit codes.
"""


class EigenpathError(Exception):
    """Base class for numerical failures."""


class DegenerateArcError(EigenpathError):
    """The two endpoint matrices are real-linearly dependent: no great-circle
    arc joins them."""


class IllPosedError(EigenpathError):
    """A reduced operator was singular at the working rank cutoff; the Newton
    map / step controller is undefined there."""


class PathFailureError(EigenpathError):
    """Path following could not maintain its invariants (stall, loss of the
    certified step equation, or an ill-posed point on the path)."""


class BudgetExceededError(EigenpathError):
    """A configured iteration/proposal cap was exhausted before termination."""


class OracleFailureError(EigenpathError):
    """The reference eigensolver did not converge on an instance."""


class SigmaCrossingError(EigenpathError):
    """The oracle continuation detected an eigenvalue collision along the arc.

    Attributes
    ----------
    interval : tuple of float
        The arc-length interval (s_lo, s_hi) bracketing the collision.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class NonconvergenceError(EigenpathError):
    """An iteration cap fired before the stopping predicate (e.g. relative
    refinement with an eigenvalue at or near zero)."""
