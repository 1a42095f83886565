"""Source locations and diagnostics shared by the whole pipeline."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLoc:
    file: str
    line: int  # 1-based
    column: int  # 1-based

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    loc: SourceLoc
    message: str

    def __str__(self) -> str:
        return f"{self.loc}: {self.severity}: {self.message}"


class FrontendError(Exception):
    """Raised internally by the parser/typechecker; carries diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics
