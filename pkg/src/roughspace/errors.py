"""Exception hierarchy shared by every module."""


class RoughSpaceError(Exception):
    """Base class for all library errors."""


class DomainError(RoughSpaceError, ValueError):
    """An input lies outside the domain where the operation is defined."""


class PreconditionError(DomainError):
    """A documented precondition of an operation does not hold."""


class ConvergenceError(RoughSpaceError, ArithmeticError):
    """An iterative or limiting procedure failed to converge."""


class SpecParseError(DomainError):
    """A CLI spec string or input file could not be parsed."""
