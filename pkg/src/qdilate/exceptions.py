class QDilateException(Exception):
    """Base exception for all qdilate exceptions."""

    pass


class DimensionError(QDilateException):
    """Operands have incompatible shapes, or a certificate would exceed the dimension cap."""

    pass


class ContractionError(QDilateException):
    """An operator that must be a contraction has norm above ``1 + tol``.
    The ``norm`` attribute carries the offending operator norm.
    """

    def __init__(self, msg, norm: float):
        super().__init__(msg)
        self.norm = norm


class GramMismatch(QDilateException):
    """Two frames handed to a unitary completion do not share a Gram matrix."""

    def __init__(self, msg, residual: float):
        super().__init__(msg)
        self.residual = residual


class NotQCommutingError(QDilateException):
    """No unimodular constant relates the two products of a pair.
    The ``pair`` attribute names the offending (i, j) indices.
    """

    def __init__(self, msg, pair: tuple[int, int]):
        super().__init__(msg)
        self.pair = pair


class StructureViolation(QDilateException):
    """A form forced by the q-commuting or anti-commuting relations is not met by the input."""

    def __init__(self, msg, reason: str = ""):
        super().__init__(msg)
        self.reason = reason


class CyclicInfeasible(QDilateException):
    """A twist constant is not periodic on the requested ring, so no exact cyclic closure exists."""

    pass


class BoundViolation(QDilateException):
    """More than three invertible pairwise anti-commuting 2x2 matrices were supplied."""

    pass


class VerificationFailure(QDilateException):
    """A certificate failed re-verification.
    The ``report`` attribute carries the residual report, ``exit_code`` the CLI exit status.
    """

    def __init__(self, msg, report=None, exit_code: int = 3):
        super().__init__(msg)
        self.report = report
        self.exit_code = exit_code
