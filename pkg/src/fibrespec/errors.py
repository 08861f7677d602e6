class FibrespecError(Exception):
    """Base class for all package errors."""


class ValidationError(FibrespecError, ValueError):
    """An argument violates an operation's precondition."""


class MeshError(ValidationError):
    """Invalid mesh geometry or topology (degenerate cells, no boundary, ...)."""


class EigenSolverError(FibrespecError):
    """The eigensolver failed to converge.

    ``residuals`` carries the best residual norms reached before giving up,
    when the backend reports any.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals
