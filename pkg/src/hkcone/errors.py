"""Exception types shared across the package."""


class HKError(Exception):
    """Base class for all package errors."""


class InputError(HKError, ValueError):
    """Malformed or inconsistent input (bad indices, mismatched spaces, ...)."""


class GeometryError(HKError, ValueError):
    """A geometric construction is undefined for the given arguments."""


class ConvergenceError(HKError, RuntimeError):
    """An iterative solver exhausted its budget before reaching tolerance.

    The partially converged result, if any, is attached as ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
