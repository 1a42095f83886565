from .diagnostics import Diagnostic, FrontendError, SourceLoc
from .lexer import Token, tokenize
from .parser import parse, parse_or_diagnostics
from .pretty import pretty, pretty_expr
from .typecheck import typecheck, typecheck_or_diagnostics
from . import syntax

__all__ = [
    "Diagnostic", "FrontendError", "SourceLoc", "Token", "tokenize",
    "parse", "parse_or_diagnostics", "pretty", "pretty_expr",
    "typecheck", "typecheck_or_diagnostics", "syntax",
]
