"""Exception hierarchy for structure loading and construction."""

from typing import Optional, Tuple


class AlgebroidError(ValueError):
    """Base class for every error raised on malformed input."""


class RingMismatchError(AlgebroidError):
    """Operands live in coefficient rings with no legal embedding."""


class InvalidStructureError(AlgebroidError):
    """A construction-time invariant does not hold.

    Attributes:
        entry: Offending (row, column) or basis index, when one exists.
    """

    def __init__(self, message: str, entry: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.entry = entry


class DegenerateError(AlgebroidError):
    """A matrix that must be invertible is singular over the fraction field."""

    def __init__(self, message: str, minor: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.minor = minor


class PreconditionError(AlgebroidError):
    """An operation's documented precondition failed; names the violated law."""

    def __init__(self, message: str, law: Optional[str] = None):
        super().__init__(message)
        self.law = law


class AttachmentError(AlgebroidError):
    """A requested check needs an attachment the structure does not carry."""


class StructureParseError(AlgebroidError):
    """Syntax or schema error in a structure file.

    Attributes:
        line: 1-based line number, or None when unknown.
        column: 1-based column number, or None when unknown.
        path: Dotted location inside the document (e.g. ``bundle.Phi[0][1]``).
    """

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, path: str = ''):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.path:
            where.append(self.path)
        if self.line is not None:
            where.append(f"{self.line}:{self.column or 1}")
        prefix = ' '.join(where)
        return f"{prefix}: {self.message}" if prefix else self.message
