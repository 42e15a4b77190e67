"""Exception hierarchy shared by the library and the command-line surface."""

from __future__ import annotations

from typing import Optional

__all__ = [
    "EpsteinError",
    "FormulaSyntaxError",
    "CapacityError",
    "PreconditionError",
    "ConditionError",
    "ProofFormatError",
    "UniverseError",
]


class EpsteinError(ValueError):
    """Base class for every error raised on bad input or unmet preconditions."""


class FormulaSyntaxError(EpsteinError):
    def __init__(self, text: str, position: int, column: Optional[int] = None, detail: str = "") -> None:
        self.text = text
        self.position = position
        self.column = column if column is not None else position + 1
        self.detail = detail
        message = f"syntax error at position {position}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class CapacityError(EpsteinError):
    """A bounded enumeration would exceed its configured limit."""


class PreconditionError(EpsteinError):
    pass


class ConditionError(EpsteinError):
    """A relation fails, or cannot be shown to satisfy, a frame condition."""


class ProofFormatError(EpsteinError):
    pass


class UniverseError(EpsteinError):
    """A Lindenbaum universe is not closed under subformulas."""
