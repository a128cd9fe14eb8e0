"""Exception hierarchy for phaselab."""


class PhaseLabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PhaseLabError, ValueError):
    """An input matrix or parameter failed a structural check."""


class ConvergenceError(PhaseLabError, ArithmeticError):
    """An iterative routine hit its refinement ceiling.

    ``residuals`` holds the last measured differences (most recent last).
    """

    def __init__(self, message, residuals=()):
        super().__init__(message)
        self.residuals = tuple(residuals)


class CyclicityError(PhaseLabError):
    """A state or subspace does not return to itself after one period."""


class DegenerateFormulaError(PhaseLabError, ZeroDivisionError):
    """A closed-form expression lost its normalization at this parameter point."""
