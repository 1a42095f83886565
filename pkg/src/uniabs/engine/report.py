"""Analysis reports: check verdicts, print blocks, text/JSON rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..frontend.diagnostics import SourceLoc

ASSERT_FAILURE = "AssertFailure"
DIVISION_BY_ZERO = "DivisionByZero"
MODULO_BY_ZERO = "ModuloByZero"
INDEX_OUT_OF_BOUND = "StringIndexOutOfBound"

RED = "\x1b[31m"
GREEN = "\x1b[32m"
RESET = "\x1b[0m"


@dataclass(frozen=True)
class CheckResult:
    kind: str
    loc: SourceLoc
    safe: bool
    message: str


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)
    prints: list[tuple[SourceLoc, list[str]]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    aborted: bool = False
    time_ms: float = 0.0
    show_safe: bool = False

    @property
    def alarms(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.safe]

    @property
    def proved(self) -> list[CheckResult]:
        return [c for c in self.checks if c.safe]

    def to_json_dict(self) -> dict:
        return {
            "alarms": [
                {
                    "kind": c.kind,
                    "line": c.loc.line,
                    "column": c.loc.column,
                    "message": c.message,
                }
                for c in self.alarms
            ],
            "prints": [
                {"line": loc.line, "state": list(lines)} for loc, lines in self.prints
            ],
            "summary": {"proved": len(self.proved), "alarms": len(self.alarms)},
            "aborted": self.aborted,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, ensure_ascii=False)

    # --- text rendering ---

    def render_print_block(self, loc: SourceLoc, lines: list[str]) -> str:
        body = "".join(f"  {line}\n" for line in lines)
        return f"print at line {loc.line}:\n{body}"

    def render_checks(self, color: bool) -> str:
        out: list[str] = []
        for check in self.checks:
            if check.safe and not self.show_safe:
                continue
            mark = "✓" if check.safe else "✗"
            line = f"{mark} {check.loc.line}:{check.loc.column}: {check.message}"
            if color:
                line = f"{GREEN}{line}{RESET}" if check.safe else f"{RED}{line}{RESET}"
            out.append(line)
        for note in self.notes:
            out.append(f"note: {note}")
        if self.aborted:
            line = "analysis aborted"
            out.append(f"{RED}{line}{RESET}" if color else line)
        out.append(f"summary: {len(self.proved)} checks proved, {len(self.alarms)} alarms")
        return "\n".join(out) + "\n"

    def render_text(self, color: bool) -> str:
        parts = [self.render_print_block(loc, lines) for loc, lines in self.prints]
        parts.append(self.render_checks(color))
        return "\n".join(parts)


def strip_ansi(text: str) -> str:
    import re

    return re.sub(r"\x1b\[[0-9;]*m", "", text)
