"""Exception types shared across the package.

Everything a caller can get wrong about the *values* it passes in derives
from :class:`DomainError`, which the CLI maps to exit status 1.
"""


class DomainError(ValueError):
    """Invalid input values (as opposed to bad command-line usage)."""


class ParameterError(DomainError):
    pass


class LengthMismatchError(DomainError):
    pass


class UnknownSymbolError(DomainError):
    pass


class AlphabetOverflowError(DomainError):
    pass


class MissingSubspaceError(DomainError):
    pass
