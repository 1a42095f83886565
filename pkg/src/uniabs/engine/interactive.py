"""The gdb-like abstract debugger.

The session runs inside the analysis task: a statement hook pauses the
engine at interesting points and enters a synchronous prompt loop on the
IO channel (`uni> `). Loop bodies re-trigger breakpoints on every
abstract pass, with a pass counter shown so repeated hits make sense.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..config import DomainStack
from ..frontend import syntax as S
from ..frontend.pretty import pretty_expr
from .channels import IOChannel
from .core import Analyzer, Cancelled, ExecPoint
from .report import Report

HELP = """commands:
  break LINE|FUNC (b)  set a breakpoint on a source line or function entry
  continue (c)         run to the next breakpoint or to completion
  next (n)             run one statement at this depth (calls and loops are opaque)
  step (s)             run to the next statement, entering calls
  finish (f)           run until the current function returns
  print [VARS] (p)     print the abstract value of VARS (all when omitted)
  env                  print the full abstract state
  where (w)            show the current location
  backtrace (bt)       show the abstract call stack
  help (h)             this message
  quit (q)             abort the analysis and leave
"""


@dataclass(frozen=True)
class DebugCommand:
    kind: str  # break|continue|next|step|finish|print|env|where|backtrace|help|quit|error
    arg: object = None


_ALIASES = {
    "b": "break", "break": "break",
    "c": "continue", "continue": "continue",
    "n": "next", "next": "next",
    "s": "step", "step": "step",
    "f": "finish", "finish": "finish",
    "p": "print", "print": "print",
    "env": "env",
    "w": "where", "where": "where",
    "bt": "backtrace", "backtrace": "backtrace",
    "h": "help", "help": "help",
    "q": "quit", "quit": "quit",
}


def parse_command(line: str) -> DebugCommand:
    """Total: unknown input becomes an `error` command, never a crash."""
    parts = line.strip().split()
    if not parts:
        return DebugCommand("error", "empty command, try help")
    head, *args = parts
    kind = _ALIASES.get(head)
    if kind is None:
        return DebugCommand("error", f"unknown command {head!r}, try help")
    if kind == "break":
        if len(args) != 1:
            return DebugCommand("error", "break expects a line number or function name")
        target: object = int(args[0]) if args[0].isdigit() else args[0]
        return DebugCommand("break", target)
    if kind == "print":
        return DebugCommand("print", args if args else None)
    if args:
        return DebugCommand("error", f"{kind} takes no arguments")
    return DebugCommand(kind)


@dataclass
class Session:
    """Interactive command loop over a paused analysis."""

    analyzer: Analyzer
    io: IOChannel
    breakpoints: set[object] = field(default_factory=set)
    mode: str = "pause"  # pause|run|next|step|finish|quit
    mode_depth: int = 0
    mode_nesting: int = 0
    finished: bool = False
    _prev_function: Optional[str] = None
    _point: Optional[ExecPoint] = None

    def run(self) -> Report:
        self.analyzer.hook = self._hook
        report = self.analyzer.run()
        self.finished = True
        self.io.write("analysis finished\n")
        return report

    # --- engine hook ---

    def _hook(self, point: ExecPoint) -> None:
        try:
            if self._should_pause(point):
                self._banner(point)
                self._prompt_loop(point)
        finally:
            self._prev_function = point.function

    def _should_pause(self, point: ExecPoint) -> bool:
        if self.mode == "pause":
            return True
        if point.loc.line in self.breakpoints:
            return True
        if point.function in self.breakpoints and self._prev_function != point.function:
            return True
        if self.mode == "step":
            return True
        if self.mode == "next":
            return point.call_depth < self.mode_depth or (
                point.call_depth == self.mode_depth and point.nesting <= self.mode_nesting
            )
        if self.mode == "finish":
            return point.call_depth < self.mode_depth
        return False

    def _banner(self, point: ExecPoint) -> None:
        passes = f" (pass {point.passes[-1]})" if point.passes else ""
        self.io.write(
            f"stopped at {point.loc}{passes}: {_describe(point.stmt)}\n"
        )

    def _prompt_loop(self, point: ExecPoint) -> None:
        self._point = point
        while True:
            self.io.write("uni> ")
            try:
                line = self.io.read_line()
            except EOFError:
                raise Cancelled() from None
            command = parse_command(line)
            events, resume = self.session_step(command)
            for event in events:
                self.io.write(event + "\n")
            if resume:
                return

    # --- one command at a pause; returns (events, resume-execution?) ---

    def session_step(self, command: DebugCommand) -> tuple[list[str], bool]:
        point = self._point
        if self.finished and command.kind in ("continue", "next", "step", "finish"):
            return ["analysis finished"], False
        if command.kind == "error":
            return [str(command.arg)], False
        if command.kind == "help":
            return [HELP.rstrip("\n")], False
        if command.kind == "break":
            self.breakpoints.add(command.arg)
            return [f"breakpoint set on {command.arg}"], False
        if command.kind == "quit":
            raise Cancelled()
        if command.kind == "continue":
            self.mode = "run"
            return [], True
        if command.kind == "step":
            self.mode = "step"
            return [], True
        if command.kind == "next":
            assert point is not None
            self.mode = "next"
            self.mode_depth = point.call_depth
            self.mode_nesting = point.nesting
            return [], True
        if command.kind == "finish":
            assert point is not None
            self.mode = "finish"
            self.mode_depth = point.call_depth
            return [], True
        if command.kind == "where":
            assert point is not None
            return [f"at {point.loc} in {point.function}"], False
        if command.kind == "backtrace":
            frames = list(self.analyzer.call_stack_names)
            lines = [f"#{i} {name}" for i, name in enumerate(reversed(frames))]
            return lines, False
        if command.kind in ("print", "env"):
            assert point is not None
            names = command.arg if command.kind == "print" else None
            if names:
                live = {n for n, _ in point.env.live_vars()}
                missing = [
                    n for n in names
                    if n not in live and point.env.resolve(n) not in live
                ]
                if missing:
                    return [f"no such variable: {', '.join(missing)}"], False
                return point.env.render_lines(only=list(names)), False
            return point.env.render_lines(), False
        raise AssertionError(f"unknown command {command!r}")  # pragma: no cover


def _describe(stmt: S.Stmt) -> str:
    if isinstance(stmt, S.Decl):
        return f"{stmt.ty} {stmt.name}{' = ...' if stmt.init else ''};"
    if isinstance(stmt, S.Assign):
        return f"{stmt.name} = {pretty_expr(stmt.value)};"
    if isinstance(stmt, S.While):
        return f"while ({pretty_expr(stmt.cond)}) ..."
    if isinstance(stmt, S.If):
        return f"if ({pretty_expr(stmt.cond)}) ..."
    if isinstance(stmt, S.Break):
        return "break;"
    if isinstance(stmt, S.Return):
        return "return ...;"
    if isinstance(stmt, S.Print):
        return "print();"
    if isinstance(stmt, S.Assert):
        return f"assert({pretty_expr(stmt.cond)});"
    if isinstance(stmt, S.Block):
        return "{ ... }"
    if isinstance(stmt, S.ExprStmt):
        return f"{pretty_expr(stmt.call)};"
    return type(stmt).__name__


def run_session(
    program: S.TypedProgram,
    stack: DomainStack,
    io: IOChannel,
    cancel=None,
) -> Report:
    analyzer = Analyzer(program, stack, io, cancel=cancel)
    return Session(analyzer, io).run()
