"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula or state is defined."""


class DegenerateInputError(ValueError):
    """The input carries no information for the requested operation."""


class NumericError(ArithmeticError):
    """A numerical routine failed to converge or produced an unusable result."""


class InternalConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""


class AttackValidationError(ValueError):
    """Attack parameters do not describe a bona fide covariance matrix."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class UnsupportedCombinationError(NotImplementedError):
    """The requested protocol/attack combination has no closed form here."""
