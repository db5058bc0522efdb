from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .syntax.nodes import Span


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: Optional[Span] = None
    rule: Optional[str] = None
    severity: str = "error"

    def format(self, filename: str = "<input>") -> str:
        where = f"{filename}:{self.span}" if self.span else f"{filename}:0:0"
        tag = f" [{self.rule}]" if self.rule else ""
        return f"{where}: {self.message}{tag}"

    def __str__(self) -> str:
        return self.format()


class DiagnosticError(Exception):
    """Raised with one or more diagnostics attached."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class ParseError(DiagnosticError):
    pass


class TypingError(DiagnosticError):
    pass
