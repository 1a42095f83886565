"""IO channel abstraction: the engine's only window to the outside world.

The same engine serves the CLI (terminal channel) and the web worker
(message channel); the interactive debugger blocks on read_line().
"""
from __future__ import annotations

import sys


class IOChannel:
    def write(self, text: str) -> None:
        raise NotImplementedError

    def read_line(self) -> str:
        raise NotImplementedError


class TerminalChannel(IOChannel):
    def __init__(self, out=None, inp=None):
        self.out = out if out is not None else sys.stdout
        self.inp = inp if inp is not None else sys.stdin

    def write(self, text: str) -> None:
        self.out.write(text)
        self.out.flush()

    def read_line(self) -> str:
        line = self.inp.readline()
        if line == "":
            raise EOFError("input channel closed")
        return line.rstrip("\n")


class BufferChannel(IOChannel):
    """Collects output; serves scripted input lines. Used by tests."""

    def __init__(self, lines: list[str] | None = None):
        self.chunks: list[str] = []
        self.lines = list(lines or [])

    def write(self, text: str) -> None:
        self.chunks.append(text)

    def read_line(self) -> str:
        if not self.lines:
            raise EOFError("no scripted input left")
        return self.lines.pop(0)

    def text(self) -> str:
        return "".join(self.chunks)


class NullChannel(IOChannel):
    def write(self, text: str) -> None:
        pass

    def read_line(self) -> str:
        raise EOFError("null channel has no input")
