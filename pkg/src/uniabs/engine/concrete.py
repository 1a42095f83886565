"""Concrete reference interpreter: the soundness oracle for the analyzer.

Runs a program over every resolution of its rand() choices (exhaustively
up to a path budget, then by seeded sampling) and records concrete states
at print points and at program end, plus every runtime failure. Semantics
mirror the abstract engine: ints default to 0, strings to "", division
truncates toward zero, rand with an empty range silently kills the path.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..frontend import syntax as S
from ..frontend.diagnostics import SourceLoc
from ..domains.intervals import trunc_div, trunc_mod
from . import report as R


@dataclass(frozen=True)
class ConcreteFailure:
    kind: str
    loc: SourceLoc
    message: str


@dataclass
class ConcreteResult:
    print_states: list[tuple[int, dict]] = field(default_factory=list)  # (line, state)
    end_states: list[dict] = field(default_factory=list)
    failures: list[ConcreteFailure] = field(default_factory=list)
    paths: int = 0
    sampled: bool = False


class _Fork(Exception):
    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi


class _Dead(Exception):
    """Path has no continuation (empty rand range)."""


class _Fail(Exception):
    def __init__(self, failure: ConcreteFailure):
        self.failure = failure


class _BreakSignal(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


class _Run:
    def __init__(self, program: S.TypedProgram, choices: tuple[int, ...], rng=None):
        self.program = program
        self.choices = choices
        self.used = 0
        self.rng = rng
        self.result_prints: list[tuple[int, dict]] = []
        self.toplevel: dict[str, object] = {}

    def choose(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise _Dead()
        if self.used < len(self.choices):
            value = self.choices[self.used]
            self.used += 1
            return value
        if self.rng is not None:
            self.used += 1
            return self.rng.randint(lo, hi)
        raise _Fork(lo, hi)

    # --- expressions ---

    def eval(self, e: S.Expr, env: dict):
        if isinstance(e, S.IntLit):
            return e.value
        if isinstance(e, S.CharLit):
            return e.code
        if isinstance(e, S.StrLit):
            return e.value
        if isinstance(e, S.Var):
            return env[e.name]
        if isinstance(e, S.Unary):
            v = self.eval(e.operand, env)
            return -v if e.op == "-" else (0 if v != 0 else 1)
        if isinstance(e, S.Rand):
            lo = self.eval(e.lo, env)
            hi = self.eval(e.hi, env)
            return self.choose(lo, hi)
        if isinstance(e, S.Binary):
            if e.op == "&&":
                return 1 if self.eval(e.lhs, env) != 0 and self.eval(e.rhs, env) != 0 else 0
            if e.op == "||":
                return 1 if self.eval(e.lhs, env) != 0 or self.eval(e.rhs, env) != 0 else 0
            l = self.eval(e.lhs, env)
            r = self.eval(e.rhs, env)
            if e.op == "@":
                return l + r
            if e.op in ("==", "!="):
                return int((l == r) == (e.op == "=="))
            if e.op == "<":
                return int(l < r)
            if e.op == "<=":
                return int(l <= r)
            if e.op == ">":
                return int(l > r)
            if e.op == ">=":
                return int(l >= r)
            if e.op == "+":
                return l + r
            if e.op == "-":
                return l - r
            if e.op == "*":
                return l * r
            if e.op in ("/", "%"):
                if r == 0:
                    kind = R.DIVISION_BY_ZERO if e.op == "/" else R.MODULO_BY_ZERO
                    raise _Fail(ConcreteFailure(kind, e.loc, "division by zero"))
                return trunc_div(l, r) if e.op == "/" else trunc_mod(l, r)
        if isinstance(e, S.Index):
            base = self.eval(e.base, env)
            idx = self.eval(e.index, env)
            if not (0 <= idx < len(base)):
                raise _Fail(
                    ConcreteFailure(
                        R.INDEX_OUT_OF_BOUND, e.loc, f"index {idx} out of bounds"
                    )
                )
            return ord(base[idx])
        if isinstance(e, S.Length):
            return len(self.eval(e.base, env))
        if isinstance(e, S.Call):
            if e.name == "char_to_str":
                code = self.eval(e.args[0], env)
                if not 0 <= code <= 127:
                    raise _Fail(
                        ConcreteFailure(
                            R.ASSERT_FAILURE, e.loc, f"char_to_str({code}) out of ASCII"
                        )
                    )
                return chr(code)
            fn = self.program.functions[e.name]
            frame = {
                pname: self.eval(arg, env)
                for (_, pname), arg in zip(fn.params, e.args)
            }
            try:
                self.exec(fn.body, frame)
            except _ReturnSignal as ret:
                return ret.value
            raise AssertionError(f"function {e.name} did not return")
        raise AssertionError(f"unknown expression {e!r}")  # pragma: no cover

    # --- statements ---

    def exec(self, stmt: S.Stmt, env: dict) -> None:
        if isinstance(stmt, S.Decl):
            env[stmt.name] = (
                self.eval(stmt.init, env)
                if stmt.init is not None
                else (0 if stmt.ty == S.INT else "")
            )
        elif isinstance(stmt, S.Assign):
            env[stmt.name] = self.eval(stmt.value, env)
        elif isinstance(stmt, S.Block):
            declared = [s.name for s in stmt.stmts if isinstance(s, S.Decl)]
            try:
                for sub in stmt.stmts:
                    self.exec(sub, env)
            finally:
                for name in declared:
                    env.pop(name, None)
        elif isinstance(stmt, S.If):
            if self.eval(stmt.cond, env) != 0:
                self.exec_scoped(stmt.then, env)
            elif stmt.orelse is not None:
                self.exec_scoped(stmt.orelse, env)
        elif isinstance(stmt, S.While):
            while self.eval(stmt.cond, env) != 0:
                try:
                    self.exec_scoped(stmt.body, env)
                except _BreakSignal:
                    break
        elif isinstance(stmt, S.Break):
            raise _BreakSignal()
        elif isinstance(stmt, S.Return):
            raise _ReturnSignal(self.eval(stmt.value, env) if stmt.value else None)
        elif isinstance(stmt, S.Print):
            if env is self.toplevel:
                self.result_prints.append((stmt.loc.line, dict(env)))
        elif isinstance(stmt, S.Assert):
            if self.eval(stmt.cond, env) == 0:
                raise _Fail(
                    ConcreteFailure(R.ASSERT_FAILURE, stmt.loc, "assertion failed")
                )
        elif isinstance(stmt, S.ExprStmt):
            self.eval(stmt.call, env)
        else:  # pragma: no cover
            raise AssertionError(f"unknown statement {stmt!r}")

    def exec_scoped(self, stmt: S.Stmt, env: dict) -> None:
        if isinstance(stmt, S.Block):
            self.exec(stmt, env)
        elif isinstance(stmt, S.Decl):
            self.exec(stmt, env)
            env.pop(stmt.name, None)
        else:
            self.exec(stmt, env)

    def go(self):
        for stmt in self.program.toplevel:
            self.exec(stmt, self.toplevel)


def concrete_run(
    program: S.TypedProgram, budget: int = 10_000, seed: int = 0
) -> ConcreteResult:
    """Enumerate rand outcomes exhaustively up to `budget` paths, then
    fall back to `budget` seeded random samples."""
    result = ConcreteResult()
    pending: list[tuple[int, ...]] = [()]
    queued = 1
    while pending:
        prefix = pending.pop()
        run = _Run(program, prefix)
        try:
            run.go()
        except _Fork as fork:
            span = fork.hi - fork.lo + 1
            queued += span
            if queued > budget:
                return _sampled_run(program, budget, seed)
            for value in range(fork.lo, fork.hi + 1):
                pending.append(prefix + (value,))
            continue
        except _Dead:
            result.paths += 1
            continue
        except _Fail as failure:
            result.failures.append(failure.failure)
            result.paths += 1
            result.print_states.extend(run.result_prints)
            continue
        result.paths += 1
        result.print_states.extend(run.result_prints)
        result.end_states.append(dict(run.toplevel))
    return result


def _sampled_run(program: S.TypedProgram, budget: int, seed: int) -> ConcreteResult:
    result = ConcreteResult(sampled=True)
    rng = random.Random(seed)
    for _ in range(budget):
        run = _Run(program, (), rng=rng)
        try:
            run.go()
        except _Dead:
            pass
        except _Fail as failure:
            result.failures.append(failure.failure)
            result.print_states.extend(run.result_prints)
        else:
            result.print_states.extend(run.result_prints)
            result.end_states.append(dict(run.toplevel))
        result.paths += 1
    return result
