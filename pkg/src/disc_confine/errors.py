"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ``SpecError``/``CallerError`` -> 2,
``HypothesisViolation`` -> 3, ``NumericError`` -> 4.
"""


class ConfinementError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ConfinementError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class SpecError(ConfinementError, ValueError):
    """A field specification or configuration is malformed."""


class CallerError(ConfinementError, ValueError):
    """A documented precondition of an operation is not met by the caller."""


class HypothesisViolation(ConfinementError):
    """A mathematical hypothesis required by a criterion fails for the input."""


class NumericError(ConfinementError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``where`` carries the interval or radius at fault when known.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where
