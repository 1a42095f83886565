"""Non-relational numeric environment: variable -> (Interval, Congruence).

The environment serves three configurations through the same code: plain
intervals, plain congruences, and their reduced product. Disabled
components are pinned to top so transfer functions stay uniform.

Expressions reaching this module are purely numeric: the engine has
already rewritten string lengths to ghost variables and hoisted calls and
index reads into temporaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..frontend import syntax as S
from .congruences import Congruence
from .intervals import (
    Interval,
    NEG_INF,
    POS_INF,
    badd,
    bneg,
    ceil_div_bound,
    floor_div_bound,
    is_finite,
)

Pair = tuple[Interval, Congruence]

_NEGATE = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}
_SWAP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


def reduce_itv_congr(itv: Interval, congr: Congruence) -> Pair:
    """Tighten each component against the other; exact on the pair.

    Bounds move to the nearest member of the congruence; a singleton
    interval turns the congruence into a constant; an empty intersection
    yields (bottom, bottom).
    """
    if itv.is_bottom or congr.is_bottom:
        return Interval.bottom(), Congruence.bottom()
    if congr.is_const():
        if not itv.contains(congr.remainder):
            return Interval.bottom(), Congruence.bottom()
        return Interval.const(congr.remainder), congr
    if congr.is_top():
        pass
    else:
        a, b = congr.modulus, congr.remainder
        lo, hi = itv.lo, itv.hi
        if is_finite(lo):
            lo = lo + (b - lo) % a
        if is_finite(hi):
            hi = hi - (hi - b) % a
        if lo > hi:
            return Interval.bottom(), Congruence.bottom()
        itv = Interval(lo, hi)
    if itv.is_const():
        congr = Congruence.const(itv.lo)  # type: ignore[arg-type]
    return itv, congr


@dataclass(frozen=True)
class NonRelEnv:
    bindings: dict[str, Pair] = field(default_factory=dict)
    reachable: bool = True
    use_intervals: bool = True
    use_congruences: bool = True
    use_reduction: bool = False

    # --- plumbing ---

    def top_pair(self) -> Pair:
        return Interval.top(), Congruence.top()

    def get(self, var: str) -> Pair:
        if not self.reachable:
            return Interval.bottom(), Congruence.bottom()
        return self.bindings.get(var, self.top_pair())

    def set(self, var: str, itv: Interval, congr: Congruence) -> "NonRelEnv":
        if not self.reachable:
            return self
        if not self.use_intervals:
            itv = Interval.top()
        if not self.use_congruences:
            congr = Congruence.top()
        if self.use_reduction:
            itv, congr = reduce_itv_congr(itv, congr)
        if itv.is_bottom or congr.is_bottom:
            return self.unreachable()
        return replace(self, bindings={**self.bindings, var: (itv, congr)})

    def remove(self, names) -> "NonRelEnv":
        names = set(names)
        return replace(self, bindings={v: p for v, p in self.bindings.items() if v not in names})

    def rename(self, mapping: dict[str, str]) -> "NonRelEnv":
        return replace(
            self, bindings={mapping.get(v, v): p for v, p in self.bindings.items()}
        )

    def unreachable(self) -> "NonRelEnv":
        return replace(self, bindings={}, reachable=False)

    def is_bottom(self) -> bool:
        return not self.reachable

    def vars(self) -> set[str]:
        return set(self.bindings)

    # --- lattice, pointwise ---

    def _pointwise(self, other: "NonRelEnv", itv_op, congr_op) -> "NonRelEnv":
        merged: dict[str, Pair] = {}
        for var in set(self.bindings) | set(other.bindings):
            i1, c1 = self.get(var)
            i2, c2 = other.get(var)
            merged[var] = (itv_op(i1, i2), congr_op(c1, c2))
        return replace(self, bindings=merged, reachable=True)

    def join(self, other: "NonRelEnv") -> "NonRelEnv":
        if not self.reachable:
            return other
        if not other.reachable:
            return self
        return self._pointwise(other, Interval.join, Congruence.join)

    def widen(self, other: "NonRelEnv", thresholds: tuple[int, ...] = ()) -> "NonRelEnv":
        if not self.reachable:
            return other
        if not other.reachable:
            return self
        return self._pointwise(
            other, lambda a, b: a.widen(b, thresholds), Congruence.widen
        )

    def meet(self, other: "NonRelEnv") -> "NonRelEnv":
        if not self.reachable or not other.reachable:
            return self.unreachable()
        out = self
        for var in set(self.bindings) | set(other.bindings):
            i1, c1 = self.get(var)
            i2, c2 = other.get(var)
            out = out.set(var, i1.meet(i2), c1.meet(c2))
            if not out.reachable:
                return out
        return out

    def leq(self, other: "NonRelEnv") -> bool:
        if not self.reachable:
            return True
        if not other.reachable:
            return False
        for var in set(self.bindings) | set(other.bindings):
            i1, c1 = self.get(var)
            i2, c2 = other.get(var)
            if not (i1.leq(i2) and c1.leq(c2)):
                return False
        return True


# --- evaluation -------------------------------------------------------------


def itv_eval(e: S.Expr, env: NonRelEnv) -> Interval:
    if env.is_bottom():
        return Interval.bottom()
    if isinstance(e, S.IntLit):
        return Interval.const(e.value)
    if isinstance(e, S.Var):
        return env.get(e.name)[0]
    if isinstance(e, S.Unary):
        sub = itv_eval(e.operand, env)
        if e.op == "-":
            return -sub
        return _truthiness(sub, negate=True)
    if isinstance(e, S.Rand):
        lo = itv_eval(e.lo, env)
        hi = itv_eval(e.hi, env)
        if lo.is_bottom or hi.is_bottom:
            return Interval.bottom()
        return Interval.range(lo.lo, hi.hi)
    if isinstance(e, S.Binary):
        if e.op in ("&&", "||"):
            l = _truthiness(itv_eval(e.lhs, env))
            r = _truthiness(itv_eval(e.rhs, env))
            if l.is_bottom or r.is_bottom:
                return Interval.bottom()
            if e.op == "&&":
                if l == Interval.const(0) or r == Interval.const(0):
                    return Interval.const(0)
                if l == Interval.const(1) and r == Interval.const(1):
                    return Interval.const(1)
            else:
                if l == Interval.const(1) or r == Interval.const(1):
                    return Interval.const(1)
                if l == Interval.const(0) and r == Interval.const(0):
                    return Interval.const(0)
            return Interval(0, 1)
        l = itv_eval(e.lhs, env)
        r = itv_eval(e.rhs, env)
        if l.is_bottom or r.is_bottom:
            return Interval.bottom()
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        if e.op == "*":
            return l * r
        if e.op == "/":
            return l.divided_by(r)
        if e.op == "%":
            return l.modulo(r)
        return _compare(e.op, l, r)
    raise AssertionError(f"non-numeric expression reached itv_eval: {e!r}")


def _truthiness(iv: Interval, negate: bool = False) -> Interval:
    """Map a value interval to the 0/1 interval of its (negated) truth value."""
    if iv.is_bottom:
        return iv
    if not iv.contains(0):
        return Interval.const(0 if negate else 1)
    if iv == Interval.const(0):
        return Interval.const(1 if negate else 0)
    return Interval(0, 1)


def _compare(op: str, l: Interval, r: Interval) -> Interval:
    definitely = {
        "<": l.hi < r.lo,
        "<=": l.hi <= r.lo,
        ">": l.lo > r.hi,
        ">=": l.lo >= r.hi,
        "==": l.is_const() and r.is_const() and l.lo == r.lo,
        "!=": l.meet(r).is_bottom,
    }[op]
    if definitely:
        return Interval.const(1)
    impossible = {
        "<": l.lo >= r.hi,
        "<=": l.lo > r.hi,
        ">": l.hi <= r.lo,
        ">=": l.hi < r.lo,
        "==": l.meet(r).is_bottom,
        "!=": l.is_const() and r.is_const() and l.lo == r.lo,
    }[op]
    if impossible:
        return Interval.const(0)
    return Interval(0, 1)


def congr_eval(e: S.Expr, env: NonRelEnv) -> Congruence:
    if env.is_bottom():
        return Congruence.bottom()
    if isinstance(e, S.IntLit):
        return Congruence.const(e.value)
    if isinstance(e, S.Var):
        return env.get(e.name)[1]
    if isinstance(e, S.Unary):
        if e.op == "-":
            return -congr_eval(e.operand, env)
        return Congruence.top()
    if isinstance(e, S.Rand):
        lo = congr_eval(e.lo, env)
        hi = congr_eval(e.hi, env)
        if lo.is_bottom or hi.is_bottom:
            return Congruence.bottom()
        if lo.is_const() and hi.is_const() and lo.remainder == hi.remainder:
            return lo
        return Congruence.top()
    if isinstance(e, S.Binary):
        l = congr_eval(e.lhs, env)
        r = congr_eval(e.rhs, env)
        if l.is_bottom or r.is_bottom:
            return Congruence.bottom()
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        if e.op == "*":
            return l * r
        if e.op == "/":
            return l.divided_by(r)
        if e.op == "%":
            return l.modulo(r)
        return Congruence.top()
    raise AssertionError(f"non-numeric expression reached congr_eval: {e!r}")


def nonrel_assign(env: NonRelEnv, var: str, e: S.Expr) -> NonRelEnv:
    if env.is_bottom():
        return env
    itv = itv_eval(e, env)
    congr = congr_eval(e, env)
    if itv.is_bottom or congr.is_bottom:
        return env.unreachable()
    return env.set(var, itv, congr)


# --- filtering ---------------------------------------------------------------


def itv_filter(cond: S.Expr, env: NonRelEnv) -> NonRelEnv:
    """Refine `env` under the assumption cond != 0."""
    return _filter(cond, env, True)


def itv_filter_not(cond: S.Expr, env: NonRelEnv) -> NonRelEnv:
    """Refine `env` under the assumption cond == 0."""
    return _filter(cond, env, False)


def _filter(e: S.Expr, env: NonRelEnv, positive: bool) -> NonRelEnv:
    if env.is_bottom():
        return env
    if isinstance(e, S.Unary) and e.op == "!":
        return _filter(e.operand, env, not positive)
    if isinstance(e, S.Binary):
        if e.op == "&&":
            if positive:
                return _filter(e.rhs, _filter(e.lhs, env, True), True)
            return _filter(e.lhs, env, False).join(
                _filter(e.rhs, _filter(e.lhs, env, True), False)
            )
        if e.op == "||":
            if positive:
                return _filter(e.lhs, env, True).join(
                    _filter(e.rhs, _filter(e.lhs, env, False), True)
                )
            return _filter(e.rhs, _filter(e.lhs, env, False), False)
        if e.op in _NEGATE:
            op = e.op if positive else _NEGATE[e.op]
            return _filter_cmp(op, e.lhs, e.rhs, env)
    # Generic integer condition: e != 0 (positive) or e == 0 (negative).
    zero = S.IntLit(e.loc, value=0)
    zero.ty = S.INT
    return _filter_cmp("!=" if positive else "==", e, zero, env)


def _filter_cmp(op: str, l: S.Expr, r: S.Expr, env: NonRelEnv) -> NonRelEnv:
    il = itv_eval(l, env)
    ir = itv_eval(r, env)
    if il.is_bottom or ir.is_bottom:
        return env.unreachable()
    if op == "<":
        lt = Interval(NEG_INF, badd(ir.hi, -1))
        rt = Interval(badd(il.lo, 1), POS_INF)
    elif op == "<=":
        lt = Interval(NEG_INF, ir.hi)
        rt = Interval(il.lo, POS_INF)
    elif op == ">":
        lt = Interval(badd(ir.lo, 1), POS_INF)
        rt = Interval(NEG_INF, badd(il.hi, -1))
    elif op == ">=":
        lt = Interval(ir.lo, POS_INF)
        rt = Interval(NEG_INF, il.hi)
    elif op == "==":
        lt, rt = ir, il
    else:  # "!="
        lt = _shave(il, ir)
        rt = _shave(ir, il)
    out = _refine(l, lt, env)
    out = _refine(r, rt, out)
    if op == "==":
        out = _congr_refine(l, congr_eval(r, env), out)
        out = _congr_refine(r, congr_eval(l, env), out)
    return out


def _shave(iv: Interval, excluded: Interval) -> Interval | None:
    """Remove a known-constant excluded value when it sits on an endpoint."""
    if not excluded.is_const():
        return None
    k = excluded.lo
    if not iv.contains(k):  # type: ignore[arg-type]
        return None
    if iv.is_const():
        return Interval.bottom()
    if iv.lo == k:
        return Interval(k + 1, iv.hi)  # type: ignore[operator]
    if iv.hi == k:
        return Interval(iv.lo, k - 1)  # type: ignore[operator]
    return None


def _refine(e: S.Expr, target: Interval | None, env: NonRelEnv) -> NonRelEnv:
    """One backward pass pushing a target interval into sub-expressions."""
    if target is None or env.is_bottom():
        return env
    if target.is_bottom:
        return env.unreachable()
    if isinstance(e, S.IntLit):
        return env if target.contains(e.value) else env.unreachable()
    if isinstance(e, S.Var):
        itv, congr = env.get(e.name)
        return env.set(e.name, itv.meet(target), congr)
    if isinstance(e, S.Unary) and e.op == "-":
        return _refine(e.operand, -target, env)
    if isinstance(e, S.Binary):
        if e.op == "+":
            l, r = itv_eval(e.lhs, env), itv_eval(e.rhs, env)
            env = _refine(e.lhs, target - r, env)
            return _refine(e.rhs, target - l, env)
        if e.op == "-":
            l, r = itv_eval(e.lhs, env), itv_eval(e.rhs, env)
            env = _refine(e.lhs, target + r, env)
            return _refine(e.rhs, l - target, env)
        if e.op == "*":
            l, r = itv_eval(e.lhs, env), itv_eval(e.rhs, env)
            if r.is_const() and r.lo != 0:
                return _refine(e.lhs, _div_target(target, r.lo), env)  # type: ignore[arg-type]
            if l.is_const() and l.lo != 0:
                return _refine(e.rhs, _div_target(target, l.lo), env)  # type: ignore[arg-type]
    return env


def _div_target(target: Interval, c: int) -> Interval:
    """Solve x*c ∈ target for x."""
    if target.is_bottom:
        return target
    lo, hi = target.lo, target.hi
    if c < 0:
        lo, hi = bneg(hi), bneg(lo)
        c = -c
    return Interval.range(ceil_div_bound(lo, c), floor_div_bound(hi, c))


def _congr_refine(e: S.Expr, other: Congruence, env: NonRelEnv) -> NonRelEnv:
    if env.is_bottom() or not isinstance(e, S.Var):
        return env
    itv, congr = env.get(e.name)
    return env.set(e.name, itv, congr.meet(other))
