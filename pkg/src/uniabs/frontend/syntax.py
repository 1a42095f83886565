"""AST node definitions for Universal.

Expression nodes carry an optional `ty` slot filled in by the typechecker
("int" or "str"). Structural comparison helpers below ignore locations and
types so pretty/parse round-trips can be checked for shape equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional, Union

from .diagnostics import SourceLoc

INT = "int"
STR = "str"


@dataclass
class Expr:
    loc: SourceLoc
    ty: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class IntLit(Expr):
    value: int = 0


@dataclass
class CharLit(Expr):
    code: int = 0  # rewritten to IntLit by the typechecker


@dataclass
class StrLit(Expr):
    value: str = ""


@dataclass
class Var(Expr):
    name: str = ""


@dataclass
class Unary(Expr):
    op: str = ""  # "-" | "!"
    operand: Expr = None  # type: ignore[assignment]


@dataclass
class Binary(Expr):
    op: str = ""  # + - * / % < <= > >= == != && || @
    lhs: Expr = None  # type: ignore[assignment]
    rhs: Expr = None  # type: ignore[assignment]


@dataclass
class Index(Expr):
    base: Expr = None  # type: ignore[assignment]
    index: Expr = None  # type: ignore[assignment]


@dataclass
class Length(Expr):
    base: Expr = None  # type: ignore[assignment]


@dataclass
class Rand(Expr):
    lo: Expr = None  # type: ignore[assignment]
    hi: Expr = None  # type: ignore[assignment]


@dataclass
class Call(Expr):
    name: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass
class Stmt:
    loc: SourceLoc


@dataclass
class Decl(Stmt):
    ty: str = INT
    name: str = ""
    init: Optional[Expr] = None


@dataclass
class Assign(Stmt):
    name: str = ""
    value: Expr = None  # type: ignore[assignment]


@dataclass
class While(Stmt):
    cond: Expr = None  # type: ignore[assignment]
    body: Stmt = None  # type: ignore[assignment]


@dataclass
class If(Stmt):
    cond: Expr = None  # type: ignore[assignment]
    then: Stmt = None  # type: ignore[assignment]
    orelse: Optional[Stmt] = None


@dataclass
class Break(Stmt):
    pass


@dataclass
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass
class ExprStmt(Stmt):
    call: Expr = None  # type: ignore[assignment]


@dataclass
class Print(Stmt):
    pass


@dataclass
class Assert(Stmt):
    cond: Expr = None  # type: ignore[assignment]


@dataclass
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)


@dataclass
class FunDecl:
    loc: SourceLoc
    name: str
    params: list[tuple[str, str]]  # (type, name)
    return_type: str
    body: Block


@dataclass
class Program:
    functions: list[FunDecl]
    toplevel: list[Stmt]


@dataclass
class TypedProgram:
    functions: dict[str, FunDecl]
    toplevel: list[Stmt]
    symbols: dict[tuple[str, str], str]  # (scope, name) -> type; scope "" is toplevel


Node = Union[Expr, Stmt, FunDecl, Program, TypedProgram]

_SKIP_FIELDS = {"loc", "ty"}


def ast_equal(a: object, b: object) -> bool:
    """Structural equality ignoring source locations and inferred types.

    Decl's `ty` field is the declared type and is *not* skipped; the skip
    list only applies to Expr's inferred-type slot.
    """
    if type(a) is not type(b):
        return False
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(ast_equal(x, y) for x, y in zip(a, b))  # type: ignore[arg-type]
    if isinstance(a, dict):
        assert isinstance(b, dict)
        return set(a) == set(b) and all(ast_equal(a[k], b[k]) for k in a)
    if hasattr(a, "__dataclass_fields__"):
        for f in fields(a):  # type: ignore[arg-type]
            if f.name in _SKIP_FIELDS and isinstance(a, Expr):
                continue
            if f.name == "loc":
                continue
            if not ast_equal(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    return a == b
