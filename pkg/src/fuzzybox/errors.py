"""Exception hierarchy shared by all modules."""


class FuzzyboxError(Exception):
    pass


class DomainError(FuzzyboxError, ValueError):
    """Input outside the mathematical domain of an operation."""


class CoverageError(DomainError):
    """Grid does not cover the support of the requested object."""


class ResolutionError(DomainError):
    """Grid spacing too coarse for the length scales involved."""


class ConfigError(FuzzyboxError, ValueError):
    pass


class NumericalError(FuzzyboxError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DivergenceError(NumericalError):
    """Integration produced a non-finite state; ``last_state`` is the last valid one."""

    def __init__(self, message, last_state=None, trajectory=None):
        super().__init__(message)
        self.last_state = last_state
        self.trajectory = trajectory
