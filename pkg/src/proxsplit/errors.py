"""Exception hierarchy shared across the package."""


class ProxsplitError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(ProxsplitError, ValueError):
    """Vector or matrix shapes are inconsistent with the operation."""


class NonSymmetricError(ProxsplitError, ValueError):
    """A matrix required to be symmetric is not (beyond tolerance)."""


class RankDeficiencyError(ProxsplitError, ValueError):
    """A constraint operator required to have full row rank does not."""


class SingularKktError(ProxsplitError, ValueError):
    """KKT block system is singular; carries the observed rank defect."""

    def __init__(self, message: str, *, size: int | None = None,
                 rank: int | None = None):
        super().__init__(message)
        self.size = size
        self.rank = rank


class InfeasibleConstraintError(ProxsplitError, ValueError):
    """An affine constraint set is empty (no x with Lx = b)."""


class EigenConvergenceError(ProxsplitError, RuntimeError):
    """Eigen-iteration failed to converge within the iteration cap.

    ``best_estimate`` holds whatever partial result is available (may be
    None) and ``converged`` is always False.
    """

    def __init__(self, message: str, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.converged = False


class CapabilityError(ProxsplitError, ValueError):
    """A solver subproblem has no supported closed-form update."""


class UnboundedIterationError(ProxsplitError, ValueError):
    """No finite iteration count guarantees the target accuracy (rate >= 1)."""
