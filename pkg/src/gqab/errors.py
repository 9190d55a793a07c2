"""Exception types shared across the package."""


class GQABError(Exception):
    pass


class InvariantViolation(GQABError):
    """A property guaranteed by the theory failed numerically."""


class ConvergenceError(GQABError):
    """An iterative solver exhausted its iteration budget."""


class ProjectionError(ConvergenceError):
    """e-projection did not reach the gradient tolerance.

    Carries the best multiplier vector found and its gradient sup-norm.
    """

    def __init__(self, message, tau=None, residual=None):
        super().__init__(message)
        self.tau = tau
        self.residual = residual


class ParseError(GQABError):
    """Malformed input file."""
