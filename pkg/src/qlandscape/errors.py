"""Exception hierarchy shared by all modules."""


class LandscapeError(Exception):
    """Base class for errors raised by qlandscape."""


class InvalidInputError(LandscapeError, ValueError):
    """Input violates a documented precondition."""


class NumericalError(LandscapeError):
    """A numerical procedure failed to produce a trustworthy result."""


class NonSmoothPointError(NumericalError):
    """The fidelity modulus is not differentiable at the requested point."""


class ClosureError(NumericalError):
    """Lie closure did not stabilize within the iteration cap."""

    def __init__(self, message, partial_basis=None):
        super().__init__(message)
        self.partial_basis = partial_basis


class RefinementError(NumericalError):
    """Critical point refinement failed inside a bracketing interval."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket
