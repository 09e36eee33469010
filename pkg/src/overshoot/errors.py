"""Exception types raised by the synthesis and verification pipeline."""


class OvershootError(Exception):
    pass


class SingularMatrixError(OvershootError):
    """A pivot fell below the singularity threshold during factorization."""


class DuplicateNodeError(OvershootError, ValueError):
    pass


class NotControllableError(OvershootError):
    """The controllability matrix is rank deficient at the requested tolerance."""


class ReductionError(OvershootError):
    """No candidate control extended the Heymann basis at some step.

    For a controllable pair this cannot happen in exact arithmetic, so it
    signals that the rank tolerance is too tight or too loose.
    """


class LambdaDomainError(OvershootError, ValueError):
    """Decay rate below 1.

    The overshoot bound only holds for lambda >= 1; the eigenvalue ladder
    needs lambda_1 <= -1 so that every node has modulus at least one.
    """


class DimensionError(OvershootError, ValueError):
    pass
