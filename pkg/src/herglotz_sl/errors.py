"""Exception and warning types raised by the solver."""


class HerglotzSLError(Exception):
    """Base class for all errors raised by this package."""


class ProblemValidationError(HerglotzSLError, ValueError):
    """A problem description violates an invariant.

    Parameters
    ----------
    field : str
        Dotted path of the offending field, e.g. ``"boundary.beta"``.
    message : str
        Human readable description of the violated constraint.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class PoleEvaluation(HerglotzSLError, ValueError):
    """A coupling was evaluated at (or numerically on top of) one of its poles."""

    def __init__(self, lam, pole):
        self.lam = lam
        self.pole = pole
        super().__init__(f"lambda={lam!r} lies on the pole {pole!r}")


class SlopeZero(HerglotzSLError, ValueError):
    """Reciprocal expansion requested for a coupling with zero slope."""


class InterlacingViolation(HerglotzSLError, ValueError):
    """Zeros and poles do not strictly interlace."""


class NumericalFailure(HerglotzSLError, ArithmeticError):
    """An iterative numerical procedure did not converge."""


class IntegratorFailure(NumericalFailure):
    """The ODE integrator stopped before reaching the end of the interval."""


class NotAPole(HerglotzSLError, ValueError):
    """A pole-only routine was called at a point that is not a coupling pole."""


class EigenvalueLambda(HerglotzSLError, ArithmeticError):
    """The spectral parameter is (numerically) an eigenvalue.

    Attributes
    ----------
    lam : complex
        The offending spectral parameter.
    residual : float
        Size of the vanishing denominator.
    """

    def __init__(self, lam, residual, what="characteristic function"):
        self.lam = lam
        self.residual = residual
        super().__init__(
            f"lambda={lam!r} is numerically an eigenvalue "
            f"(|{what}|={residual:.3e})"
        )


class DomainViolation(HerglotzSLError, ValueError):
    """A block vector does not lie in the operator domain."""

    def __init__(self, condition, residual, tol):
        self.condition = condition
        self.residual = residual
        super().__init__(
            f"domain condition {condition!r} violated: "
            f"residual {residual:.3e} > tolerance {tol:.3e}"
        )


class MeshTooCoarse(HerglotzSLError, ValueError):
    """Fewer interior mesh points than the discretisation requires."""


class EigensolverFailure(NumericalFailure):
    """Dense eigensolver failed or returned inconsistent output."""


class SuspectedDoubleRoot(UserWarning):
    """The characteristic function touches zero without changing sign."""
