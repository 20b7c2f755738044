from __future__ import annotations


class SimplexError(ValueError):
    """Base class for every error raised by simplex_infogeo."""


class NonPositivePart(SimplexError):
    pass


class DimensionTooSmall(SimplexError):
    pass


class DimensionMismatch(SimplexError):
    pass


class NotInTangentSpace(SimplexError):
    pass


class EmptySelection(SimplexError):
    pass


class InvalidPartition(SimplexError):
    pass


class InvalidContrast(SimplexError):
    pass


class OutOfDomain(SimplexError):
    pass


class CoordinateDomainError(SimplexError):
    pass


class NonConvexPotential(SimplexError):
    pass


class NegativeWeight(SimplexError):
    pass


class ParameterOutOfRange(SimplexError):
    pass


class BasePointMismatch(SimplexError):
    pass


class InvalidSubset(SimplexError):
    pass


class InputError(SimplexError):
    """Problems with user-supplied files or flags (CLI exit code 2)."""


class ParseError(InputError):
    def __init__(self, message: str, *, row: int | None = None, column: str | None = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column!r}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.row = row
        self.column = column


class ZeroPartError(ParseError):
    pass


class RaggedRows(ParseError):
    pass


class UnknownPartName(InputError):
    pass


class ConfigError(InputError):
    pass


class DegenerateFamilyWarning(UserWarning):
    """All feature rows of an exponential family coincide; the family is a single point."""
