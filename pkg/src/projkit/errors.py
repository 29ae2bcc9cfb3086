"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands live in different ambient dimensions."""


class SpecValidationError(ValueError):
    """A set, potential, measure-space, or config description is invalid."""


class PreconditionError(ValueError):
    """A documented operation precondition does not hold."""


class LevelRangeError(ValueError):
    """A requested level or target lies outside the invertible range."""


class ConvergenceError(RuntimeError):
    """An iterative solve stopped before reaching its tolerance.

    Carries the last residual so callers can report how far the iteration got.
    """

    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual
