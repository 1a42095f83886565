"""The toplevel analysis: transfer functions, loop fixpoints, inlining.

The same Analyzer serves the automatic engine, the interactive debugger
(through the statement hook) and the web worker (through the IO channel
plus the cancellation flag). Expressions are "hoisted" before numeric
evaluation: calls are inlined into result temporaries, index reads are
checked and materialized, and string lengths become ghost-variable reads,
so the numeric backends only ever see arithmetic over dimensions.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..config import DomainStack, widening_thresholds
from ..domains.intervals import Interval
from ..frontend import syntax as S
from ..frontend.diagnostics import SourceLoc
from .channels import IOChannel, NullChannel
from .env import AbstractEnv, EnvSettings, PolyBackend, _var
from . import report as R


class EngineError(Exception):
    """Internal analysis abort (not a program alarm)."""


class Cancelled(Exception):
    """Cooperative cancellation requested by the host."""


@dataclass(frozen=True)
class EngineOptions:
    widening_delay: int = 1
    loop_unrolling: int = 0
    decreasing_iterations: int = 1
    thresholds: tuple[int, ...] = ()
    call_depth: int = 64
    show_safe_checks: bool = False

    @staticmethod
    def from_stack(stack: DomainStack) -> "EngineOptions":
        opts = stack.options
        return EngineOptions(
            widening_delay=max(0, int(opts.get("widening-delay", 1))),
            loop_unrolling=max(0, int(opts.get("loop-unrolling", 0))),
            decreasing_iterations=max(0, int(opts.get("decreasing-iterations", 1))),
            thresholds=widening_thresholds(stack),
            call_depth=max(1, int(opts.get("call-depth", 64))),
            show_safe_checks=bool(opts.get("show-safe-checks", False)),
        )


@dataclass(frozen=True)
class ExecPoint:
    """Statement-boundary snapshot handed to the debugger hook."""

    loc: SourceLoc
    stmt: S.Stmt
    env: AbstractEnv
    call_depth: int
    nesting: int
    passes: tuple[int, ...]
    function: str


@dataclass
class _BreakCtx:
    collector: AbstractEnv
    base_blocks: int


@dataclass
class _ReturnCtx:
    ret_name: str
    ret_type: str
    collector: Optional[AbstractEnv] = None


Cleanup = list[tuple[str, str]]  # ("int" | "str", name)

_MAX_FIXPOINT_PASSES = 1000


class Analyzer:
    def __init__(
        self,
        program: S.TypedProgram,
        stack: DomainStack,
        io: IOChannel | None = None,
        cancel: Callable[[], bool] | None = None,
        hook: Callable[[ExecPoint], None] | None = None,
        debug_checks: bool = False,
    ):
        self.program = program
        self.stack = stack
        self.io = io if io is not None else NullChannel()
        self.cancel = cancel
        self.hook = hook
        self.debug_checks = debug_checks
        self.opts = EngineOptions.from_stack(stack)
        self.settings = EnvSettings.from_stack(stack)
        self.color = not bool(stack.options.get("no-color", False))
        self.notes: list[str] = []
        self.checks: dict[tuple[str, SourceLoc], R.CheckResult] = {}
        self.prints: list[tuple[SourceLoc, list[str]]] = []
        self.print_envs: list[tuple[SourceLoc, AbstractEnv]] = []
        self.recording = True
        self.temp_seq = 0
        self.frame_seq = 0
        self.break_stack: list[_BreakCtx] = []
        self.return_stack: list[_ReturnCtx] = []
        self.loop_passes: list[int] = []
        self.call_stack_names: list[str] = ["<toplevel>"]
        self._stmt_depth = 0

    # --- plumbing ---

    def _fresh(self, prefix: str) -> str:
        self.temp_seq += 1
        return f"%{prefix}{self.temp_seq}"

    def _initial_env(self) -> AbstractEnv:
        env = AbstractEnv.initial(self.settings)
        if isinstance(env.backend, PolyBackend):
            env = env.__class__(
                env.settings,
                PolyBackend(env.backend.poly, self.notes),
                env.powersets,
                env.scopes,
            )
        return env

    def record_check(
        self, env: AbstractEnv, kind: str, loc: SourceLoc, safe: bool, message: str
    ) -> None:
        if not self.recording or env.is_bottom():
            return
        key = (kind, loc)
        previous = self.checks.get(key)
        if previous is not None and not previous.safe:
            return  # an alarm verdict is final for the site
        self.checks[key] = R.CheckResult(kind, loc, safe, message)

    def record_print(self, env: AbstractEnv, loc: SourceLoc) -> None:
        if not self.recording or env.is_bottom():
            return
        lines = env.render_lines()
        self.prints.append((loc, lines))
        self.print_envs.append((loc, env))
        block = R.Report().render_print_block(loc, lines)
        self.io.write(block + "\n")

    def _drop(self, env: AbstractEnv, cleanup: Cleanup) -> AbstractEnv:
        for kind, name in cleanup:
            if kind == "int":
                env = env.drop_temps([name])
            else:
                env = env.str_drop(name)
        return env

    class _NoRecord:
        def __init__(self, analyzer: "Analyzer"):
            self.analyzer = analyzer

        def __enter__(self):
            self.saved = self.analyzer.recording
            self.analyzer.recording = False

        def __exit__(self, *exc):
            self.analyzer.recording = self.saved

    # --- statements ---

    def exec_stmt(self, env: AbstractEnv, stmt: S.Stmt) -> AbstractEnv:
        if env.is_bottom():
            return env
        if self.cancel is not None and self.cancel():
            raise Cancelled()
        if self.hook is not None:
            self.hook(
                ExecPoint(
                    stmt.loc,
                    stmt,
                    env,
                    len(env.scopes),
                    len(env.scopes[-1][1]),
                    tuple(self.loop_passes),
                    self.call_stack_names[-1],
                )
            )
        self._stmt_depth += 1
        try:
            env = self._dispatch(env, stmt)
        finally:
            self._stmt_depth -= 1
        if self.debug_checks and self._stmt_depth == 0 and not env.is_bottom():
            expected = env.expected_dims()
            actual = env.backend.dims()
            if expected != actual:
                raise EngineError(
                    f"ghost dimension leak at {stmt.loc}: "
                    f"extra={sorted(actual - expected)} missing={sorted(expected - actual)}"
                )
        return env

    def _dispatch(self, env: AbstractEnv, stmt: S.Stmt) -> AbstractEnv:
        if isinstance(stmt, S.Decl):
            env = env.declare(stmt.name, stmt.ty)
            if stmt.init is not None:
                env = self._do_assign(env, stmt.name, stmt.ty, stmt.init)
            return env
        if isinstance(stmt, S.Assign):
            ty = env.lookup_type(env.resolve(stmt.name))
            assert ty is not None, f"unknown variable {stmt.name}"
            return self._do_assign(env, stmt.name, ty, stmt.value)
        if isinstance(stmt, S.Block):
            env = env.push_block()
            for sub in stmt.stmts:
                env = self.exec_stmt(env, sub)
            return env.pop_block()
        if isinstance(stmt, S.If):
            env2, res, cleanup = self.eval_int(env, stmt.cond)
            then_env = self._drop(env2.filter(res, True), cleanup)
            else_env = self._drop(env2.filter(res, False), cleanup)
            then_post = self._exec_in_block(then_env, stmt.then)
            else_post = (
                self._exec_in_block(else_env, stmt.orelse)
                if stmt.orelse is not None
                else else_env
            )
            return then_post.join(else_post)
        if isinstance(stmt, S.While):
            return self.loop_fixpoint(env, stmt)
        if isinstance(stmt, S.Break):
            ctx = self.break_stack[-1]
            escaped = env
            while len(escaped.scopes[-1][1]) > ctx.base_blocks:
                escaped = escaped.pop_block()
            ctx.collector = ctx.collector.join(escaped)
            return env.bottomize()
        if isinstance(stmt, S.Return):
            return self._do_return(env, stmt)
        if isinstance(stmt, S.Print):
            self.record_print(env, stmt.loc)
            return env
        if isinstance(stmt, S.Assert):
            env2, res, cleanup = self.eval_int(env, stmt.cond)
            if not env2.is_bottom():
                safe = env2.filter(res, False).is_bottom()
                message = "assertion proved" if safe else "assertion may fail"
                self.record_check(env2, R.ASSERT_FAILURE, stmt.loc, safe, message)
            return self._drop(env2.filter(res, True), cleanup)
        if isinstance(stmt, S.ExprStmt):
            call = stmt.call
            if isinstance(call, S.Rand):
                env2, _, cleanup = self.eval_int(env, call)
                return self._drop(env2, cleanup)
            assert isinstance(call, S.Call)
            if call.ty == S.STR or (
                call.name in self.program.functions
                and self.program.functions[call.name].return_type == S.STR
            ):
                env2, handle, cleanup = self.eval_str(env, call, own=True)
                return self._drop(env2.str_drop(handle), cleanup)
            env2, _, cleanup = self.eval_int(env, call)
            return self._drop(env2, cleanup)
        raise AssertionError(f"unknown statement {stmt!r}")  # pragma: no cover

    def _exec_in_block(self, env: AbstractEnv, stmt: S.Stmt) -> AbstractEnv:
        """Run a statement in its own scope block (loop bodies, branches)."""
        if isinstance(stmt, S.Block):
            return self.exec_stmt(env, stmt)
        if env.is_bottom():
            return env
        env = env.push_block()
        env = self.exec_stmt(env, stmt)
        return env.pop_block()

    def _do_assign(self, env: AbstractEnv, name: str, ty: str, value: S.Expr) -> AbstractEnv:
        internal = env.resolve(name)
        if ty == S.INT:
            env2, res, cleanup = self.eval_int(env, value)
            env3 = env2.assign_int(internal, res)
            return self._drop(env3, cleanup)
        env2, handle, cleanup = self.eval_str(env, value, own=True)
        env3 = env2.str_assign_from_handle(internal, handle)
        return self._drop(env3, cleanup)

    def _do_return(self, env: AbstractEnv, stmt: S.Return) -> AbstractEnv:
        ctx = self.return_stack[-1]
        assert stmt.value is not None  # enforced by the typechecker
        if ctx.ret_type == S.INT:
            env2, res, cleanup = self.eval_int(env, stmt.value)
            env2 = env2.define_temp(ctx.ret_name, res)
            env2 = self._drop(env2, cleanup)
        else:
            env2, handle, cleanup = self.eval_str(env, stmt.value, own=True)
            env2 = env2.str_assign_from_handle(ctx.ret_name, handle)
            env2 = self._drop(env2, cleanup)
        while len(env2.scopes[-1][1]) > 1:
            env2 = env2.pop_block()
        ctx.collector = env2 if ctx.collector is None else ctx.collector.join(env2)
        return env.bottomize()

    # --- loops ---

    def loop_fixpoint(self, env: AbstractEnv, stmt: S.While) -> AbstractEnv:
        if "loops" not in self.stack.iterators:
            raise EngineError("the configuration lacks the 'loops' iterator")
        opts = self.opts
        exits = env.bottomize()
        self.loop_passes.append(0)
        try:
            # Exact unrolled prefix.
            for _ in range(opts.loop_unrolling):
                if env.is_bottom():
                    break
                self.loop_passes[-1] += 1
                env2, res, cleanup = self.eval_int(env, stmt.cond)
                exits = exits.join(self._drop(env2.filter(res, False), cleanup))
                pos = self._drop(env2.filter(res, True), cleanup)
                if pos.is_bottom():
                    env = pos
                    break
                post, breaks = self._body_pass(pos, stmt.body)
                exits = exits.join(breaks)
                env = post
            entry = env
            if not entry.is_bottom():
                head = entry
                delay = opts.widening_delay
                passes = 0
                while True:
                    passes += 1
                    if passes > _MAX_FIXPOINT_PASSES:
                        raise EngineError("loop fixpoint did not stabilize")
                    self.loop_passes[-1] += 1
                    with self._NoRecord(self):
                        env2, res, cleanup = self.eval_int(head, stmt.cond)
                        pos = self._drop(env2.filter(res, True), cleanup)
                        post, _ = self._body_pass(pos, stmt.body)
                    candidate = head.join(post)
                    if candidate.leq(head):
                        break
                    if delay > 0:
                        head = candidate
                        delay -= 1
                    else:
                        head = head.widen(candidate, opts.thresholds)
                for _ in range(opts.decreasing_iterations):
                    self.loop_passes[-1] += 1
                    with self._NoRecord(self):
                        env2, res, cleanup = self.eval_int(head, stmt.cond)
                        pos = self._drop(env2.filter(res, True), cleanup)
                        post, _ = self._body_pass(pos, stmt.body)
                    head = head.meet(entry.join(post))
                # Final recording pass from the stable invariant.
                self.loop_passes[-1] += 1
                env2, res, cleanup = self.eval_int(head, stmt.cond)
                pos = self._drop(env2.filter(res, True), cleanup)
                post, breaks = self._body_pass(pos, stmt.body)
                exits = exits.join(breaks)
                exits = exits.join(self._drop(env2.filter(res, False), cleanup))
        finally:
            self.loop_passes.pop()
        return exits

    def _body_pass(self, env: AbstractEnv, body: S.Stmt) -> tuple[AbstractEnv, AbstractEnv]:
        self.break_stack.append(_BreakCtx(env.bottomize(), len(env.scopes[-1][1])))
        post = self._exec_in_block(env, body)
        ctx = self.break_stack.pop()
        return post, ctx.collector

    # --- expressions (hoisting evaluators) ---

    def eval_int(self, env: AbstractEnv, e: S.Expr) -> tuple[AbstractEnv, S.Expr, Cleanup]:
        """Reduce e to a backend-evaluable residual, performing calls,
        checks and string reads; returns (env, residual, temp cleanup)."""
        if isinstance(e, (S.IntLit, S.CharLit)):
            if isinstance(e, S.CharLit):  # typechecker rewrites these, but be total
                lit = S.IntLit(e.loc, value=e.code)
                lit.ty = S.INT
                return env, lit, []
            return env, e, []
        if isinstance(e, S.Var):
            resolved = S.Var(e.loc, name=env.resolve(e.name))
            resolved.ty = S.INT
            return env, resolved, []
        if isinstance(e, S.Unary):
            env, sub, cleanup = self.eval_int(env, e.operand)
            out = S.Unary(e.loc, op=e.op, operand=sub)
            out.ty = S.INT
            return env, out, cleanup
        if isinstance(e, S.Rand):
            env, lo, cl1 = self.eval_int(env, e.lo)
            env, hi, cl2 = self.eval_int(env, e.hi)
            out = S.Rand(e.loc, lo=lo, hi=hi)
            out.ty = S.INT
            return env, out, cl1 + cl2
        if isinstance(e, S.Binary):
            if e.lhs.ty == S.STR and e.op in ("==", "!="):
                return self._eval_str_compare(env, e)
            env, lhs, cl1 = self.eval_int(env, e.lhs)
            env, rhs, cl2 = self.eval_int(env, e.rhs)
            cleanup = cl1 + cl2
            if e.op in ("/", "%"):
                env = self._division_check(env, e, rhs)
            out = S.Binary(e.loc, op=e.op, lhs=lhs, rhs=rhs)
            out.ty = S.INT
            return env, out, cleanup
        if isinstance(e, S.Length):
            env, handle, cleanup = self.eval_str(env, e.base, own=False)
            temp = self._fresh("len")
            env, residual = env.str_length_expr(handle, temp)
            if isinstance(residual, S.Var) and residual.name == temp:
                cleanup = cleanup + [("int", temp)]
            return env, residual, cleanup
        if isinstance(e, S.Index):
            return self._eval_index(env, e)
        if isinstance(e, S.Call):
            return self._inline_int_call(env, e)
        raise AssertionError(f"unexpected expression {e!r}")  # pragma: no cover

    def _division_check(self, env: AbstractEnv, e: S.Binary, divisor: S.Expr) -> AbstractEnv:
        if env.is_bottom():
            return env
        kind = R.DIVISION_BY_ZERO if e.op == "/" else R.MODULO_BY_ZERO
        word = "division" if e.op == "/" else "modulo"
        iv = env.bounds(divisor)
        safe = not iv.contains(0)
        message = f"{word} by zero impossible" if safe else f"possible {word} by zero"
        self.record_check(env, kind, e.loc, safe, message)
        if safe:
            return env
        nonzero = S.Binary(e.loc, op="!=", lhs=divisor, rhs=_int_lit(0, e.loc))
        nonzero.ty = S.INT
        return env.filter(nonzero, True)

    def _eval_index(self, env: AbstractEnv, e: S.Index) -> tuple[AbstractEnv, S.Expr, Cleanup]:
        env, handle, cleanup = self.eval_str(env, e.base, own=False)
        env, j_res, cl2 = self.eval_int(env, e.index)
        cleanup = cleanup + cl2
        ltemp = self._fresh("len")
        env, len_expr = env.str_length_expr(handle, ltemp)
        if isinstance(len_expr, S.Var) and len_expr.name == ltemp:
            cleanup = cleanup + [("int", ltemp)]
        loc = e.loc
        upper = S.Binary(loc, op="-", lhs=len_expr, rhs=_int_lit(1, loc))
        upper.ty = S.INT
        low_ok = S.Binary(loc, op=">=", lhs=j_res, rhs=_int_lit(0, loc))
        low_ok.ty = S.INT
        high_ok = S.Binary(loc, op="<=", lhs=j_res, rhs=upper)
        high_ok.ty = S.INT
        cond = S.Binary(loc, op="&&", lhs=low_ok, rhs=high_ok)
        cond.ty = S.INT
        if not env.is_bottom():
            safe = env.entails(cond)
            message = (
                "string index within bounds" if safe else "string index may be out of bounds"
            )
            self.record_check(env, R.INDEX_OUT_OF_BOUND, loc, safe, message)
        env = env.filter(cond, True)
        vtemp = self._fresh("chr")
        env = env.str_index_define(handle, vtemp, env.bounds(j_res))
        out = S.Var(loc, name=vtemp)
        out.ty = S.INT
        return env, out, cleanup + [("int", vtemp)]

    def _eval_str_compare(self, env: AbstractEnv, e: S.Binary) -> tuple[AbstractEnv, S.Expr, Cleanup]:
        env, ah, cl1 = self.eval_str(env, e.lhs, own=False)
        env, bh, cl2 = self.eval_str(env, e.rhs, own=False)
        cleanup = cl1 + cl2
        iv = env.str_equality(ah, bh)
        if e.op == "!=":
            if iv.is_const():
                iv = Interval.const(1 - iv.lo)  # type: ignore[operator]
        if iv.is_const():
            return env, _int_lit(iv.lo, e.loc), cleanup  # type: ignore[arg-type]
        temp = self._fresh("cmp")
        rand = S.Rand(e.loc, lo=_int_lit(0, e.loc), hi=_int_lit(1, e.loc))
        rand.ty = S.INT
        env = env.define_temp(temp, rand)
        out = S.Var(e.loc, name=temp)
        out.ty = S.INT
        return env, out, cleanup + [("int", temp)]

    def _char_to_str_check(self, env: AbstractEnv, loc: SourceLoc, code: S.Expr) -> AbstractEnv:
        low_ok = S.Binary(loc, op=">=", lhs=code, rhs=_int_lit(0, loc))
        low_ok.ty = S.INT
        high_ok = S.Binary(loc, op="<=", lhs=code, rhs=_int_lit(127, loc))
        high_ok.ty = S.INT
        cond = S.Binary(loc, op="&&", lhs=low_ok, rhs=high_ok)
        cond.ty = S.INT
        if not env.is_bottom():
            safe = env.entails(cond)
            message = (
                "char_to_str code within ASCII"
                if safe
                else "char_to_str code may fall outside ASCII"
            )
            self.record_check(env, R.ASSERT_FAILURE, loc, safe, message)
        return env.filter(cond, True)

    # --- string expressions ---

    def eval_str(
        self, env: AbstractEnv, e: S.Expr, own: bool
    ) -> tuple[AbstractEnv, str, Cleanup]:
        """Evaluate a string expression to a ghost-variable handle.

        With own=False a plain variable is borrowed (no copy); with
        own=True the returned handle is always caller-owned.
        """
        if isinstance(e, S.StrLit):
            handle = self._fresh("str")
            env = env.str_define_literal(handle, e.value)
            return env, handle, [("str", handle)]
        if isinstance(e, S.Var):
            internal = env.resolve(e.name)
            if not own:
                return env, internal, []
            handle = self._fresh("str")
            env = env.str_define_copy(handle, internal)
            return env, handle, [("str", handle)]
        if isinstance(e, S.Binary) and e.op == "@":
            env, ah, cl1 = self.eval_str(env, e.lhs, own=False)
            env, bh, cl2 = self.eval_str(env, e.rhs, own=False)
            handle = self._fresh("str")
            env = env.str_define_concat(handle, ah, bh)
            return env, handle, cl1 + cl2 + [("str", handle)]
        if isinstance(e, S.Call) and e.name == "char_to_str":
            env, code, cleanup = self.eval_int(env, e.args[0])
            env = self._char_to_str_check(env, e.loc, code)
            handle = self._fresh("str")
            env = env.str_define_char(handle, code)
            return env, handle, cleanup + [("str", handle)]
        if isinstance(e, S.Call):
            env, handle, cleanup = self._inline_call(env, e)
            return env, handle, cleanup + [("str", handle)]
        raise AssertionError(f"unexpected string expression {e!r}")  # pragma: no cover

    # --- function calls ---

    def _inline_int_call(self, env: AbstractEnv, call: S.Call) -> tuple[AbstractEnv, S.Expr, Cleanup]:
        env, ret_name, cleanup = self._inline_call(env, call)
        out = S.Var(call.loc, name=ret_name)
        out.ty = S.INT
        return env, out, cleanup + [("int", ret_name)]

    def _inline_call(self, env: AbstractEnv, call: S.Call) -> tuple[AbstractEnv, str, Cleanup]:
        if "interproc" not in self.stack.iterators:
            raise EngineError("function calls require the 'interproc' iterator")
        fn = self.program.functions[call.name]
        if len(self.return_stack) + 1 > self.opts.call_depth:
            raise EngineError(
                f"recursion depth exceeded (call-depth={self.opts.call_depth})"
            )
        items: list[tuple[str, object]] = []
        cleanup: Cleanup = []
        for arg, (pty, _) in zip(call.args, fn.params):
            if pty == S.INT:
                env, res, cl = self.eval_int(env, arg)
                items.append((pty, res))
                cleanup += cl
            else:
                env, handle, cl = self.eval_str(env, arg, own=True)
                items.append((pty, handle))
                cleanup += cl
        self.frame_seq += 1
        prefix = f"{fn.name}#{self.frame_seq}."
        env = env.push_frame(prefix)
        for (pty, pname), (_, item) in zip(fn.params, items):
            env = env.declare(pname, pty)
            internal = prefix + pname
            if pty == S.INT:
                env = env.assign_int(internal, item)  # type: ignore[arg-type]
            else:
                env = env.str_assign_from_handle(internal, item)  # type: ignore[arg-type]
        ret_name = f"%ret{self.frame_seq}"
        ctx = _ReturnCtx(ret_name, fn.return_type)
        self.return_stack.append(ctx)
        self.call_stack_names.append(fn.name)
        try:
            after = self.exec_stmt(env, fn.body)
        finally:
            self.call_stack_names.pop()
            self.return_stack.pop()
        result = ctx.collector if ctx.collector is not None else after.bottomize()
        result = result.pop_frame()
        return result, ret_name, cleanup

    # --- entry point ---

    def run(self) -> R.Report:
        start = time.monotonic()
        aborted = False
        self.final_env: Optional[AbstractEnv] = None
        try:
            env = self._initial_env()
            for stmt in self.program.toplevel:
                env = self.exec_stmt(env, stmt)
            self.final_env = env
        except EngineError as exc:
            self.notes.append(str(exc))
            aborted = True
        except Cancelled:
            self.notes.append("analysis interrupted")
            aborted = True
        report = R.Report(
            checks=sorted(
                self.checks.values(), key=lambda c: (c.loc.line, c.loc.column, c.kind)
            ),
            prints=self.prints,
            notes=self.notes,
            aborted=aborted,
            time_ms=(time.monotonic() - start) * 1000.0,
            show_safe=self.opts.show_safe_checks,
        )
        self.io.write(report.render_checks(self.color))
        return report


def _int_lit(value: int, loc: SourceLoc) -> S.Expr:
    lit = S.IntLit(loc, value=value)
    lit.ty = S.INT
    return lit


def run(
    program: S.TypedProgram,
    stack: DomainStack,
    io: IOChannel | None = None,
    cancel: Callable[[], bool] | None = None,
    debug_checks: bool = False,
) -> R.Report:
    """Run the automatic engine to completion."""
    return Analyzer(program, stack, io, cancel, debug_checks=debug_checks).run()
