"""Exception types shared across the package."""


class EquivlabError(Exception):
    """Base class for every error raised by equivlab."""


class DomainError(EquivlabError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class NumericalError(EquivlabError, ArithmeticError):
    """A computation produced a non-finite value or failed to converge."""
