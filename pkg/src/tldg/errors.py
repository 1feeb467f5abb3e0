"""Exception types shared across the package."""

from dataclasses import dataclass
from typing import Optional


class GameError(Exception):
    """Base class for all errors raised by tldg."""


@dataclass(frozen=True)
class Violation:
    """One broken invariant of a game description.

    ``code`` is a stable identifier such as ``"DanglingEdge"``; ``line`` is
    the source line when the game came from a file.
    """

    code: str
    message: str
    states: tuple = ()
    line: Optional[int] = None

    def __str__(self):
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.code}: {self.message}"


class ValidationError(GameError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def codes(self):
        return [v.code for v in self.violations]


class ParseError(ValidationError):
    """Syntax-level problem in a tldg text file (always carries a line)."""


class InternalInconsistency(GameError):
    """An algorithm reached a state its invariants rule out."""


class TooLarge(GameError):
    """Strategy enumeration would exceed the configured cap."""
