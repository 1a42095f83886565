"""Hand-written lexer for Universal source files (`.u`).

Tokens carry 1-based source locations. `//` and `/* */` comments are
skipped. `||` is lexed greedily, so string-length bars need whitespace in
the rare `|s| || e` combination, like most C-family toy languages.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, FrontendError, SourceLoc

KEYWORDS = {"int", "str", "while", "if", "else", "break", "return", "print", "assert"}

# Longest-match first.
_PUNCT = [
    "&&", "||", "==", "!=", "<=", ">=",
    "+", "-", "*", "/", "%", "@", "<", ">", "=", "!", "|",
    "(", ")", "{", "}", "[", "]", ",", ";",
]

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"', "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "char" | "string" | "punct" | "keyword" | "eof"
    text: str
    loc: SourceLoc
    value: object = None  # int for "int"/"char", str payload for "string"


class _Cursor:
    def __init__(self, source: str, filename: str):
        self.src = source
        self.file = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def loc(self) -> SourceLoc:
        return SourceLoc(self.file, self.line, self.col)

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.src[i] if i < len(self.src) else ""

    def advance(self) -> str:
        ch = self.src[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def eof(self) -> bool:
        return self.pos >= len(self.src)


def _error(loc: SourceLoc, message: str) -> FrontendError:
    return FrontendError([Diagnostic("error", loc, message)])


def _lex_char_payload(cur: _Cursor, quote: str, start: SourceLoc) -> str:
    """One character (possibly escaped) inside a quoted literal."""
    if cur.eof():
        raise _error(start, "unterminated literal")
    ch = cur.advance()
    if ch == "\n":
        raise _error(start, "unterminated literal")
    if ch == "\\":
        if cur.eof():
            raise _error(start, "unterminated literal")
        esc = cur.advance()
        if esc not in _ESCAPES:
            raise _error(start, f"unknown escape sequence '\\{esc}'")
        return _ESCAPES[esc]
    return ch


def tokenize(source: str, filename: str) -> list[Token]:
    """Lex `source` into tokens ending with an `eof` token.

    Raises FrontendError with a located diagnostic on lexical errors.
    """
    cur = _Cursor(source, filename)
    tokens: list[Token] = []
    while True:
        # Skip whitespace and comments.
        while not cur.eof():
            ch = cur.peek()
            if ch in " \t\r\n":
                cur.advance()
            elif ch == "/" and cur.peek(1) == "/":
                while not cur.eof() and cur.peek() != "\n":
                    cur.advance()
            elif ch == "/" and cur.peek(1) == "*":
                start = cur.loc()
                cur.advance()
                cur.advance()
                while not (cur.peek() == "*" and cur.peek(1) == "/"):
                    if cur.eof():
                        raise _error(start, "unterminated block comment")
                    cur.advance()
                cur.advance()
                cur.advance()
            else:
                break
        if cur.eof():
            tokens.append(Token("eof", "", cur.loc()))
            return tokens

        start = cur.loc()
        ch = cur.peek()
        if ch.isdigit():
            text = ""
            while not cur.eof() and cur.peek().isdigit():
                text += cur.advance()
            tokens.append(Token("int", text, start, value=int(text)))
        elif ch.isalpha() or ch == "_":
            text = ""
            while not cur.eof() and (cur.peek().isalnum() or cur.peek() == "_"):
                text += cur.advance()
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, start))
        elif ch == "'":
            cur.advance()
            payload = _lex_char_payload(cur, "'", start)
            if cur.peek() != "'":
                raise _error(start, "unterminated character literal")
            cur.advance()
            code = ord(payload)
            if code > 127:
                raise _error(start, "character literal is not ASCII")
            tokens.append(Token("char", f"'{payload}'", start, value=code))
        elif ch == '"':
            cur.advance()
            chars = []
            while cur.peek() != '"':
                chars.append(_lex_char_payload(cur, '"', start))
            cur.advance()
            payload = "".join(chars)
            if any(ord(c) > 127 for c in payload):
                raise _error(start, "string literal is not ASCII")
            tokens.append(Token("string", payload, start, value=payload))
        else:
            for p in _PUNCT:
                if cur.src.startswith(p, cur.pos):
                    for _ in p:
                        cur.advance()
                    tokens.append(Token("punct", p, start))
                    break
            else:
                raise _error(start, f"unexpected character {ch!r}")
