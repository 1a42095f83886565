"""Type resolution for Universal programs.

Rewrites applied while checking:
  * character literals become integer literals of their ASCII code;
  * `rand(lo, hi)` calls become dedicated Rand nodes.

Functions are checked against a closed namespace: parameters and locals
only, no access to toplevel variables. Each function body must return on
every path.
"""
from __future__ import annotations

from .diagnostics import Diagnostic, FrontendError
from . import syntax as S

BUILTINS = {"rand", "print", "assert", "char_to_str"}

_INT_BINOPS = {"+", "-", "*", "/", "%"}
_ORDER_OPS = {"<", "<=", ">", ">="}
_EQ_OPS = {"==", "!="}
_BOOL_OPS = {"&&", "||"}


class _Checker:
    def __init__(self, program: S.Program):
        self.program = program
        self.diagnostics: list[Diagnostic] = []
        self.functions: dict[str, S.FunDecl] = {}
        self.symbols: dict[tuple[str, str], str] = {}
        self.scope = ""
        self.vars: dict[str, str] = {}
        self.declared: set[str] = set()  # per function, to reject redeclaration
        self.loop_depth = 0
        self.return_type: str | None = None

    def fail(self, loc, message: str) -> None:
        self.diagnostics.append(Diagnostic("error", loc, message))

    # --- entry point -------------------------------------------------------

    def run(self) -> S.TypedProgram:
        for fn in self.program.functions:
            if fn.name in BUILTINS:
                self.fail(fn.loc, f"function name {fn.name!r} shadows a builtin")
            elif fn.name in self.functions:
                self.fail(fn.loc, f"duplicate function {fn.name!r}")
            else:
                self.functions[fn.name] = fn

        for fn in self.functions.values():
            self._check_function(fn)

        self.scope = ""
        self.vars = {}
        self.declared = set()
        self.loop_depth = 0
        self.return_type = None
        for stmt in self.program.toplevel:
            self.check_stmt(stmt)

        if self.diagnostics:
            raise FrontendError(self.diagnostics)
        return S.TypedProgram(self.functions, self.program.toplevel, self.symbols)

    def _check_function(self, fn: S.FunDecl) -> None:
        self.scope = fn.name
        self.vars = {}
        self.declared = set()
        self.loop_depth = 0
        self.return_type = fn.return_type
        for pty, pname in fn.params:
            if pname in self.vars:
                self.fail(fn.loc, f"duplicate parameter {pname!r}")
            self.declared.add(pname)
            self.vars[pname] = pty
            self.symbols[(fn.name, pname)] = pty
        self.check_stmt(fn.body)
        if not _always_returns(fn.body):
            self.fail(fn.loc, f"function {fn.name!r} may fall off the end without returning")

    # --- statements ----------------------------------------------------------

    def check_stmt(self, stmt: S.Stmt) -> None:
        if isinstance(stmt, S.Decl):
            if stmt.name in self.declared:
                self.fail(stmt.loc, f"duplicate declaration of {stmt.name!r}")
            else:
                self.declared.add(stmt.name)
                self.vars[stmt.name] = stmt.ty
                self.symbols[(self.scope, stmt.name)] = stmt.ty
            if stmt.init is not None:
                stmt.init = self.check_expr(stmt.init)
                if stmt.init.ty is not None and stmt.init.ty != stmt.ty:
                    self.fail(stmt.loc, f"cannot initialize {stmt.ty} {stmt.name!r} with {stmt.init.ty}")
        elif isinstance(stmt, S.Assign):
            declared = self.vars.get(stmt.name)
            if declared is None:
                self.fail(stmt.loc, f"undefined variable {stmt.name!r}")
            stmt.value = self.check_expr(stmt.value)
            if declared is not None and stmt.value.ty is not None and stmt.value.ty != declared:
                self.fail(stmt.loc, f"cannot assign {stmt.value.ty} to {declared} {stmt.name!r}")
        elif isinstance(stmt, S.While):
            stmt.cond = self._check_cond(stmt.cond)
            self.loop_depth += 1
            self._check_body(stmt.body)
            self.loop_depth -= 1
        elif isinstance(stmt, S.If):
            stmt.cond = self._check_cond(stmt.cond)
            self._check_body(stmt.then)
            if stmt.orelse is not None:
                self._check_body(stmt.orelse)
        elif isinstance(stmt, S.Break):
            if self.loop_depth == 0:
                self.fail(stmt.loc, "'break' outside of a loop")
        elif isinstance(stmt, S.Return):
            if self.return_type is None:
                self.fail(stmt.loc, "'return' outside of a function")
            elif stmt.value is None:
                self.fail(stmt.loc, f"function must return a value of type {self.return_type}")
            else:
                stmt.value = self.check_expr(stmt.value)
                if stmt.value.ty is not None and stmt.value.ty != self.return_type:
                    self.fail(stmt.loc, f"returning {stmt.value.ty} from a {self.return_type} function")
        elif isinstance(stmt, S.ExprStmt):
            stmt.call = self.check_expr(stmt.call)
            if not isinstance(stmt.call, (S.Call, S.Rand)):
                self.fail(stmt.loc, "expression statement must be a call")
        elif isinstance(stmt, S.Print):
            pass
        elif isinstance(stmt, S.Assert):
            stmt.cond = self._check_cond(stmt.cond)
        elif isinstance(stmt, S.Block):
            locals_here = [s.name for s in stmt.stmts if isinstance(s, S.Decl)]
            for sub in stmt.stmts:
                self.check_stmt(sub)
            for name in locals_here:
                self.vars.pop(name, None)
        else:  # pragma: no cover - parser produces no other nodes
            raise AssertionError(f"unknown statement {stmt!r}")

    def _check_cond(self, cond: S.Expr) -> S.Expr:
        cond = self.check_expr(cond)
        if cond.ty == S.STR:
            self.fail(cond.loc, "condition must be an integer")
        return cond

    # --- expressions -----------------------------------------------------------

    def check_expr(self, e: S.Expr) -> S.Expr:
        if isinstance(e, S.IntLit):
            e.ty = S.INT
            return e
        if isinstance(e, S.CharLit):
            lit = S.IntLit(e.loc, value=e.code)
            lit.ty = S.INT
            return lit
        if isinstance(e, S.StrLit):
            e.ty = S.STR
            return e
        if isinstance(e, S.Var):
            declared = self.vars.get(e.name)
            if declared is None:
                self.fail(e.loc, f"undefined variable {e.name!r}")
                e.ty = S.INT
            else:
                e.ty = declared
            return e
        if isinstance(e, S.Unary):
            e.operand = self.check_expr(e.operand)
            self._require_int(e.operand, f"operand of {e.op!r}")
            e.ty = S.INT
            return e
        if isinstance(e, S.Binary):
            e.lhs = self.check_expr(e.lhs)
            e.rhs = self.check_expr(e.rhs)
            if e.op == "@":
                for side in (e.lhs, e.rhs):
                    if side.ty is not None and side.ty != S.STR:
                        self.fail(side.loc, "'@' expects string operands")
                e.ty = S.STR
            elif e.op in _EQ_OPS:
                if e.lhs.ty is not None and e.rhs.ty is not None and e.lhs.ty != e.rhs.ty:
                    self.fail(e.loc, f"{e.op!r} requires operands of the same type")
                e.ty = S.INT
            elif e.op in _ORDER_OPS or e.op in _BOOL_OPS or e.op in _INT_BINOPS:
                self._require_int(e.lhs, f"operand of {e.op!r}")
                self._require_int(e.rhs, f"operand of {e.op!r}")
                e.ty = S.INT
            else:  # pragma: no cover
                raise AssertionError(f"unknown operator {e.op!r}")
            return e
        if isinstance(e, S.Index):
            e.base = self.check_expr(e.base)
            e.index = self.check_expr(e.index)
            if e.base.ty is not None and e.base.ty != S.STR:
                self.fail(e.base.loc, "indexing expects a string")
            self._require_int(e.index, "string index")
            e.ty = S.INT
            return e
        if isinstance(e, S.Length):
            e.base = self.check_expr(e.base)
            if e.base.ty is not None and e.base.ty != S.STR:
                self.fail(e.base.loc, "'|...|' expects a string")
            e.ty = S.INT
            return e
        if isinstance(e, S.Rand):
            e.lo = self.check_expr(e.lo)
            e.hi = self.check_expr(e.hi)
            self._require_int(e.lo, "rand bound")
            self._require_int(e.hi, "rand bound")
            e.ty = S.INT
            return e
        if isinstance(e, S.Call):
            e.args = [self.check_expr(a) for a in e.args]
            if e.name == "rand":
                if len(e.args) != 2:
                    self.fail(e.loc, f"rand expects 2 arguments, got {len(e.args)}")
                    e.ty = S.INT
                    return e
                rand = S.Rand(e.loc, lo=e.args[0], hi=e.args[1])
                self._require_int(rand.lo, "rand bound")
                self._require_int(rand.hi, "rand bound")
                rand.ty = S.INT
                return rand
            if e.name == "char_to_str":
                if len(e.args) != 1:
                    self.fail(e.loc, f"char_to_str expects 1 argument, got {len(e.args)}")
                elif e.args:
                    self._require_int(e.args[0], "char_to_str argument")
                e.ty = S.STR
                return e
            if e.name in ("print", "assert"):
                self.fail(e.loc, f"{e.name!r} is a statement, not an expression")
                e.ty = S.INT
                return e
            fn = self.functions.get(e.name)
            if fn is None:
                self.fail(e.loc, f"undefined function {e.name!r}")
                e.ty = S.INT
                return e
            if len(e.args) != len(fn.params):
                self.fail(e.loc, f"{e.name!r} expects {len(fn.params)} arguments, got {len(e.args)}")
            for arg, (pty, _) in zip(e.args, fn.params):
                if arg.ty is not None and arg.ty != pty:
                    self.fail(arg.loc, f"argument type {arg.ty} does not match parameter type {pty}")
            e.ty = fn.return_type
            return e
        raise AssertionError(f"unknown expression {e!r}")  # pragma: no cover

    def _require_int(self, e: S.Expr, what: str) -> None:
        if e.ty is not None and e.ty != S.INT:
            self.fail(e.loc, f"{what} must be an integer")


def _always_returns(stmt: S.Stmt) -> bool:
    if isinstance(stmt, S.Return):
        return True
    if isinstance(stmt, S.Block):
        return any(_always_returns(s) for s in stmt.stmts)
    if isinstance(stmt, S.If):
        return stmt.orelse is not None and _always_returns(stmt.then) and _always_returns(stmt.orelse)
    return False


def typecheck(program: S.Program) -> S.TypedProgram:
    """Resolve and validate a parsed program; raises FrontendError on failure."""
    return _Checker(program).run()


def typecheck_or_diagnostics(program: S.Program):
    try:
        return typecheck(program), []
    except FrontendError as exc:
        return None, exc.diagnostics
