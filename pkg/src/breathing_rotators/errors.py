"""Exception hierarchy shared by all modules."""


class RotatorError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RotatorError, ValueError):
    """A model was evaluated outside the region where its radicands are positive."""


class ConstraintViolation(RotatorError, ValueError):
    """A state violates kk = 0, xdot.xdot > 0 or k.xdot != 0."""


class SingularKinematics(RotatorError, ArithmeticError):
    """A denominator required by the momentum expressions vanished."""


class SingularMatrix(RotatorError, ArithmeticError):
    pass


class DecompositionError(RotatorError, ArithmeticError):
    """Matrix has no identity component, so the bordered determinant does not apply."""


class DegenerateFrame(RotatorError, ArithmeticError):
    """The Gram determinant of (N, V, Omega) is too small for the elementary basis."""


class DegenerateCase(RotatorError, ArithmeticError):
    """kappa extraction hit a vanishing denominator (0/0 form)."""


class StepFailure(RotatorError, RuntimeError):
    pass


class IllPosedError(RotatorError):
    """Accelerations are not determined by positions and velocities.

    The full diagnosis (determinant, condition number, null direction) is
    available on ``.diagnosis``.
    """

    def __init__(self, diagnosis):
        self.diagnosis = diagnosis
        super().__init__(
            f"Hessian singular: scaled det={diagnosis.scaled_det:.3e}, "
            f"cond={diagnosis.condition:.3e}"
        )
