"""Abstract environments: numeric backend + string layer + scope stack.

Two interchangeable numeric backends live behind `NumericBackend`: the
interval/congruence product and the polyhedra domain. String variables
are represented through ghost dimensions `len(v)` / `ord(v)` registered
in the numeric backend (`ord` is a summarized dimension: its constraints
hold for every character of the string), plus an optional bounded
powerset of candidate strings.

Environments are immutable; every operation returns a fresh value.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from ..config import DomainStack
from ..domains import nonrel as NR
from ..domains import polyhedra as PD
from ..domains.congruences import Congruence
from ..domains.intervals import Interval, NEG_INF, POS_INF, is_finite
from ..domains.strings import StringPowerset, powerset_concat, powerset_join
from ..frontend import syntax as S
from ..frontend.diagnostics import SourceLoc

F = Fraction


def ghost_len(var: str) -> str:
    return f"len({var})"


def ghost_ord(var: str) -> str:
    return f"ord({var})"


@dataclass(frozen=True)
class EnvSettings:
    backend: str  # "nonrel" | "polyhedra"
    use_intervals: bool
    use_congruences: bool
    itv_congr_reduction: bool
    has_length: bool
    has_summary: bool
    has_powerset: bool
    string_reduction: bool
    powerset_bound: int

    @staticmethod
    def from_stack(stack: DomainStack) -> "EnvSettings":
        return EnvSettings(
            backend=stack.backend,
            use_intervals=stack.use_intervals or stack.backend == "polyhedra",
            use_congruences=stack.use_congruences,
            itv_congr_reduction="itv_congr" in stack.reductions,
            has_length="string.length" in stack.string_domains,
            has_summary="string.summary" in stack.string_domains,
            has_powerset="string.powerset" in stack.string_domains,
            string_reduction="string.length_summary" in stack.reductions,
            powerset_bound=int(stack.options.get("string.powerset.max-size", 5)),
        )


# --- numeric backends --------------------------------------------------------


class NumericBackend:
    """Shared interface of the two numeric states (immutable)."""

    def is_bottom(self) -> bool:
        raise NotImplementedError

    def bottomize(self) -> "NumericBackend":
        raise NotImplementedError

    def dims(self) -> frozenset[str]:
        raise NotImplementedError

    def add_dims(self, names) -> "NumericBackend":
        raise NotImplementedError

    def remove_dims(self, names) -> "NumericBackend":
        raise NotImplementedError

    def rename(self, mapping: dict[str, str]) -> "NumericBackend":
        raise NotImplementedError

    def assign(self, var: str, e: S.Expr) -> "NumericBackend":
        raise NotImplementedError

    def define(self, var: str, e: S.Expr) -> "NumericBackend":
        """Bind a fresh dimension to an expression (exact when linear)."""
        raise NotImplementedError

    def havoc(self, var: str) -> "NumericBackend":
        raise NotImplementedError

    def assume_le(self, lhs: dict[str, int], rhs_const: int) -> "NumericBackend":
        raise NotImplementedError

    def assume_eq(self, lhs: dict[str, int], rhs_const: int) -> "NumericBackend":
        raise NotImplementedError

    def filter(self, cond: S.Expr, positive: bool) -> "NumericBackend":
        raise NotImplementedError

    def bounds(self, e: S.Expr) -> Interval:
        raise NotImplementedError

    def congruence(self, var: str) -> Congruence | None:
        return None

    def expand(self, var: str, fresh: str) -> "NumericBackend":
        raise NotImplementedError

    def fold(self, group: list[str], into: str) -> "NumericBackend":
        raise NotImplementedError

    def join(self, other) -> "NumericBackend":
        raise NotImplementedError

    def widen(self, other, thresholds: tuple[int, ...]) -> "NumericBackend":
        raise NotImplementedError

    def meet(self, other) -> "NumericBackend":
        raise NotImplementedError

    def leq(self, other) -> bool:
        raise NotImplementedError

    def contains_point(
        self, values: dict[str, int], summaries: dict[str, list[int]]
    ) -> bool:
        raise NotImplementedError

    def relation_lines(self, display: dict[str, str]) -> list[str]:
        return []


@dataclass(frozen=True)
class NonRelBackend(NumericBackend):
    env: NR.NonRelEnv
    dimset: frozenset[str] = frozenset()

    @staticmethod
    def make(settings: EnvSettings) -> "NonRelBackend":
        return NonRelBackend(
            NR.NonRelEnv(
                use_intervals=settings.use_intervals,
                use_congruences=settings.use_congruences,
                use_reduction=settings.itv_congr_reduction,
            )
        )

    def is_bottom(self) -> bool:
        return self.env.is_bottom()

    def bottomize(self) -> "NonRelBackend":
        return replace(self, env=self.env.unreachable())

    def dims(self) -> frozenset[str]:
        return self.dimset

    def add_dims(self, names) -> "NonRelBackend":
        return replace(self, dimset=self.dimset | set(names))

    def remove_dims(self, names) -> "NonRelBackend":
        names = set(names)
        return NonRelBackend(self.env.remove(names), self.dimset - names)

    def rename(self, mapping) -> "NonRelBackend":
        return NonRelBackend(
            self.env.rename(mapping),
            frozenset(mapping.get(v, v) for v in self.dimset),
        )

    def assign(self, var: str, e: S.Expr) -> "NonRelBackend":
        return replace(self, env=NR.nonrel_assign(self.env, var, e))

    def define(self, var: str, e: S.Expr) -> "NonRelBackend":
        out = self.assign(var, e)
        return replace(out, dimset=out.dimset | {var})

    def havoc(self, var: str) -> "NonRelBackend":
        return replace(self, env=self.env.remove({var}))

    def _assume(self, lhs: dict[str, int], const: int, op: str) -> "NonRelBackend":
        loc = SourceLoc("<assume>", 1, 1)
        expr: S.Expr | None = None
        for v, c in sorted(lhs.items()):
            term: S.Expr = S.Var(loc, name=v)
            term.ty = S.INT
            if c != 1:
                lit = S.IntLit(loc, value=c)
                lit.ty = S.INT
                term = S.Binary(loc, op="*", lhs=lit, rhs=term)
                term.ty = S.INT
            expr = term if expr is None else S.Binary(loc, op="+", lhs=expr, rhs=term)
            if expr is not None:
                expr.ty = S.INT
        assert expr is not None
        konst = S.IntLit(loc, value=const)
        konst.ty = S.INT
        cmp = S.Binary(loc, op="<=" if op == PD.LE else "==", lhs=expr, rhs=konst)
        cmp.ty = S.INT
        return replace(self, env=NR.itv_filter(cmp, self.env))

    def assume_le(self, lhs, rhs_const) -> "NonRelBackend":
        return self._assume(lhs, rhs_const, PD.LE)

    def assume_eq(self, lhs, rhs_const) -> "NonRelBackend":
        return self._assume(lhs, rhs_const, PD.EQ)

    def filter(self, cond: S.Expr, positive: bool) -> "NonRelBackend":
        fn = NR.itv_filter if positive else NR.itv_filter_not
        return replace(self, env=fn(cond, self.env))

    def bounds(self, e: S.Expr) -> Interval:
        return NR.itv_eval(e, self.env)

    def congruence(self, var: str) -> Congruence | None:
        if not self.env.use_congruences:
            return None
        return self.env.get(var)[1]

    def expand(self, var: str, fresh: str) -> "NonRelBackend":
        itv, congr = self.env.get(var)
        return replace(
            self, env=self.env.set(fresh, itv, congr), dimset=self.dimset | {fresh}
        )

    def fold(self, group, into) -> "NonRelBackend":
        itv = Interval.bottom()
        congr = Congruence.bottom()
        for g in group:
            gi, gc = self.env.get(g)
            itv = itv.join(gi)
            congr = congr.join(gc)
        out = self.env.remove(set(group))
        out = out.set(into, itv, congr)
        return NonRelBackend(out, (self.dimset - set(group)) | {into})

    def join(self, other: "NonRelBackend") -> "NonRelBackend":
        return NonRelBackend(self.env.join(other.env), self.dimset | other.dimset)

    def widen(self, other: "NonRelBackend", thresholds) -> "NonRelBackend":
        return NonRelBackend(
            self.env.widen(other.env, thresholds), self.dimset | other.dimset
        )

    def meet(self, other: "NonRelBackend") -> "NonRelBackend":
        return NonRelBackend(self.env.meet(other.env), self.dimset | other.dimset)

    def leq(self, other: "NonRelBackend") -> bool:
        return self.env.leq(other.env)

    def contains_point(self, values, summaries) -> bool:
        if self.is_bottom():
            return False
        for var, value in values.items():
            itv, congr = self.env.get(var)
            if not (itv.contains(value) and congr.contains(value)):
                return False
        for var, codes in summaries.items():
            itv, congr = self.env.get(var)
            for code in codes:
                if not (itv.contains(code) and congr.contains(code)):
                    return False
        return True


def _linearize(e: S.Expr) -> tuple[dict[str, Fraction], Fraction] | None:
    if isinstance(e, S.IntLit):
        return {}, F(e.value)
    if isinstance(e, S.Var):
        return {e.name: F(1)}, F(0)
    if isinstance(e, S.Unary) and e.op == "-":
        sub = _linearize(e.operand)
        if sub is None:
            return None
        coeffs, const = sub
        return {v: -c for v, c in coeffs.items()}, -const
    if isinstance(e, S.Binary) and e.op in ("+", "-", "*"):
        l = _linearize(e.lhs)
        r = _linearize(e.rhs)
        if l is None or r is None:
            return None
        (lc, lk), (rc, rk) = l, r
        if e.op == "+":
            merged = {v: lc.get(v, F(0)) + rc.get(v, F(0)) for v in set(lc) | set(rc)}
            return merged, lk + rk
        if e.op == "-":
            merged = {v: lc.get(v, F(0)) - rc.get(v, F(0)) for v in set(lc) | set(rc)}
            return merged, lk - rk
        if not lc:  # constant * expr
            return {v: c * lk for v, c in rc.items()}, rk * lk
        if not rc:
            return {v: c * rk for v, c in lc.items()}, lk * rk
        return None
    return None


def _expr_vars(e: S.Expr) -> set[str]:
    if isinstance(e, S.Var):
        return {e.name}
    out: set[str] = set()
    for attr in ("operand", "lhs", "rhs", "lo", "hi"):
        sub = getattr(e, attr, None)
        if isinstance(sub, S.Expr):
            out |= _expr_vars(sub)
    return out


@dataclass(frozen=True)
class PolyBackend(NumericBackend):
    poly: PD.Polyhedron
    loss_notes: list = field(default_factory=list, compare=False, repr=False)

    @staticmethod
    def make(settings: EnvSettings) -> "PolyBackend":
        return PolyBackend(PD.poly_top([]))

    def _loss(self, message: str) -> None:
        self.loss_notes.append(message)

    def _wrap(self, poly: PD.Polyhedron) -> "PolyBackend":
        return PolyBackend(poly, self.loss_notes)

    def is_bottom(self) -> bool:
        return self.poly.is_bottom()

    def bottomize(self) -> "PolyBackend":
        return self._wrap(PD.poly_bottom(self.poly.dims))

    def dims(self) -> frozenset[str]:
        return frozenset(self.poly.dims)

    def add_dims(self, names) -> "PolyBackend":
        return self._wrap(PD.poly_add_dims(self.poly, names))

    def remove_dims(self, names) -> "PolyBackend":
        return self._wrap(PD.poly_remove_dims(self.poly, names, self._loss))

    def rename(self, mapping) -> "PolyBackend":
        return self._wrap(PD.poly_rename(self.poly, mapping))

    def assign(self, var: str, e: S.Expr) -> "PolyBackend":
        if self.is_bottom():
            return self
        if isinstance(e, S.Rand):
            return self._rand_assign(var, e.lo, e.hi)
        lin = _linearize(e)
        if lin is not None:
            coeffs, const = lin
            return self._wrap(PD.poly_assign(self.poly, var, coeffs, const, self._loss))
        iv = self.bounds(e)
        if iv.is_bottom:
            return self.bottomize()
        out = PD.poly_havoc(self.poly, var, self._loss)
        out = self._assume_interval(out, var, iv)
        return self._wrap(out)

    def define(self, var: str, e: S.Expr) -> "PolyBackend":
        if self.is_bottom():
            return self.add_dims([var])
        assert var not in self.poly.dims
        if isinstance(e, S.Rand):
            return self.add_dims([var])._rand_assign(var, e.lo, e.hi)
        lin = _linearize(e)
        if lin is not None:
            coeffs, const = lin
            row = dict(coeffs)
            row[var] = row.get(var, F(0)) - 1
            cons = PD.make_cons(row, PD.EQ, -const)
            poly = PD.poly_add_dims(self.poly, [var])
            if cons is not None:
                poly = PD.poly_assume(poly, cons)
            return self._wrap(poly)
        iv = self.bounds(e)
        poly = PD.poly_add_dims(self.poly, [var])
        if iv.is_bottom:
            return self._wrap(PD.poly_bottom(poly.dims))
        return self._wrap(self._assume_interval(poly, var, iv))

    @staticmethod
    def _assume_interval(poly: PD.Polyhedron, var: str, iv: Interval) -> PD.Polyhedron:
        conses = []
        if is_finite(iv.lo):
            conses.append(PD.make_cons({var: -1}, PD.LE, -iv.lo))
        if is_finite(iv.hi):
            conses.append(PD.make_cons({var: 1}, PD.LE, iv.hi))
        return PD.poly_assume_all(poly, [c for c in conses if c is not None])

    def _rand_assign(self, var: str, lo: S.Expr, hi: S.Expr) -> "PolyBackend":
        temps: list[str] = []
        out: PolyBackend = self
        sides: list[tuple[str, dict[str, Fraction], Fraction]] = []
        for tag, bound in (("lo", lo), ("hi", hi)):
            lin = _linearize(bound)
            if lin is not None and var not in lin[0]:
                sides.append((tag, *lin))
            else:
                tmp = f"__rand_{tag}__"
                out = out.define(tmp, bound)
                temps.append(tmp)
                sides.append((tag, {tmp: F(1)}, F(0)))
        poly = PD.poly_havoc(out.poly, var, self._loss)
        conses = []
        for tag, coeffs, const in sides:
            row = dict(coeffs)
            if tag == "lo":  # lo <= var
                row[var] = row.get(var, F(0)) - 1
                cons = PD.make_cons(row, PD.LE, -const)
            else:  # var <= hi
                row = {v: -c for v, c in row.items()}
                row[var] = row.get(var, F(0)) + 1
                cons = PD.make_cons(row, PD.LE, const)
            if cons is not None:
                conses.append(cons)
        poly = PD.poly_assume_all(poly, conses)
        if temps:
            poly = PD.poly_remove_dims(poly, temps, self._loss)
        return self._wrap(poly)

    def havoc(self, var: str) -> "PolyBackend":
        return self._wrap(PD.poly_havoc(self.poly, var, self._loss))

    def assume_le(self, lhs, rhs_const) -> "PolyBackend":
        cons = PD.make_cons({v: F(c) for v, c in lhs.items()}, PD.LE, F(rhs_const))
        return self if cons is None else self._wrap(PD.poly_assume(self.poly, cons))

    def assume_eq(self, lhs, rhs_const) -> "PolyBackend":
        cons = PD.make_cons({v: F(c) for v, c in lhs.items()}, PD.EQ, F(rhs_const))
        return self if cons is None else self._wrap(PD.poly_assume(self.poly, cons))

    def filter(self, cond: S.Expr, positive: bool) -> "PolyBackend":
        if self.is_bottom():
            return self
        if isinstance(cond, S.Unary) and cond.op == "!":
            return self.filter(cond.operand, not positive)
        if isinstance(cond, S.Binary) and cond.op in ("&&", "||"):
            conj = (cond.op == "&&") == positive
            left = self.filter(cond.lhs, positive)
            if conj:
                return left.filter(cond.rhs, positive)
            right = self.filter(cond.rhs, positive)
            return left._wrap(PD.poly_join(left.poly, right.poly, self._loss))
        if isinstance(cond, S.Binary) and cond.op in ("<", "<=", ">", ">=", "==", "!="):
            op = cond.op if positive else {
                "<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "==",
            }[cond.op]
            return self._filter_cmp(op, cond.lhs, cond.rhs)
        zero = S.IntLit(cond.loc, value=0)
        zero.ty = S.INT
        return self._filter_cmp("!=" if positive else "==", cond, zero)

    def _filter_cmp(self, op: str, l: S.Expr, r: S.Expr) -> "PolyBackend":
        if op == ">":
            return self._filter_cmp("<", r, l)
        if op == ">=":
            return self._filter_cmp("<=", r, l)
        ll = _linearize(l)
        rl = _linearize(r)
        if ll is not None and rl is not None:
            diff = {
                v: ll[0].get(v, F(0)) - rl[0].get(v, F(0)) for v in set(ll[0]) | set(rl[0])
            }
            const = rl[1] - ll[1]
            try:
                if op == "<":
                    cons = PD.make_cons(diff, PD.LE, const - 1)
                elif op == "<=":
                    cons = PD.make_cons(diff, PD.LE, const)
                elif op == "==":
                    cons = PD.make_cons(diff, PD.EQ, const)
                else:  # !=
                    lt = self._filter_cmp("<", l, r)
                    gt = self._filter_cmp("<", r, l)
                    return lt._wrap(PD.poly_join(lt.poly, gt.poly, self._loss))
            except ValueError:
                return self.bottomize()
            if cons is None:
                return self
            return self._wrap(PD.poly_assume(self.poly, cons))
        # A non-linear side: fall back to interval reasoning.
        from ..domains.nonrel import _compare  # shared decision table

        il, ir = self.bounds(l), self.bounds(r)
        if il.is_bottom or ir.is_bottom:
            return self.bottomize()
        verdict = _compare(op, il, ir)
        if verdict == Interval.const(0):
            return self.bottomize()
        refined = self
        if op in ("<", "<=", "=="):
            if ll is not None and is_finite(ir.hi):
                cap = F(ir.hi) - (1 if op == "<" else 0)
                refined = refined.assume_le_frac(dict(ll[0]), cap - ll[1])
            if rl is not None and is_finite(il.lo):
                low = F(il.lo) + (1 if op == "<" else 0)
                refined = refined.assume_le_frac(
                    {v: -c for v, c in rl[0].items()}, rl[1] - low
                )
        if op == "==":
            if ll is not None and is_finite(ir.lo):
                refined = refined.assume_le_frac(
                    {v: -c for v, c in ll[0].items()}, ll[1] - F(ir.lo)
                )
            if rl is not None and is_finite(il.hi):
                refined = refined.assume_le_frac(dict(rl[0]), F(il.hi) - rl[1])
        return refined

    def assume_le_frac(self, lhs: dict[str, Fraction], rhs: Fraction) -> "PolyBackend":
        cons = PD.make_cons(lhs, PD.LE, rhs)
        return self if cons is None else self._wrap(PD.poly_assume(self.poly, cons))

    def bounds(self, e: S.Expr) -> Interval:
        if self.is_bottom():
            return Interval.bottom()
        lin = _linearize(e)
        if lin is not None:
            coeffs, const = lin
            iv = PD.poly_bounds(self.poly, coeffs)
            if iv.is_bottom:
                return iv
            k = int(const) if const.denominator == 1 else const
            return Interval(
                iv.lo + k if is_finite(iv.lo) else iv.lo,
                iv.hi + k if is_finite(iv.hi) else iv.hi,
            )
        # Bind each variable to its interval and evaluate non-relationally.
        mini = NR.NonRelEnv(use_congruences=False)
        for v in sorted(_expr_vars(e)):
            mini = mini.set(v, PD.poly_bounds(self.poly, {v: 1}), Congruence.top())
        return NR.itv_eval(e, mini)

    def expand(self, var: str, fresh: str) -> "PolyBackend":
        return self._wrap(PD.poly_expand(self.poly, var, fresh))

    def fold(self, group, into) -> "PolyBackend":
        return self._wrap(PD.poly_fold(self.poly, list(group), into, self._loss))

    def join(self, other: "PolyBackend") -> "PolyBackend":
        return self._wrap(PD.poly_join(self.poly, other.poly, self._loss))

    def widen(self, other: "PolyBackend", thresholds) -> "PolyBackend":
        return self._wrap(PD.poly_widen(self.poly, other.poly))

    def meet(self, other: "PolyBackend") -> "PolyBackend":
        return self._wrap(PD.poly_meet(self.poly, other.poly))

    def leq(self, other: "PolyBackend") -> bool:
        return PD.poly_leq(self.poly, other.poly)

    def contains_point(self, values, summaries) -> bool:
        if self.is_bottom():
            return False
        import itertools

        for cons in self.poly.rows:
            row_summary = [v for v, _ in cons.coeffs if v in summaries]
            fixed = {
                v: F(values[v]) for v, _ in cons.coeffs if v in values
            }
            if len(fixed) + len(row_summary) != len(cons.coeffs):
                missing = [
                    v for v, _ in cons.coeffs if v not in values and v not in summaries
                ]
                raise KeyError(f"concrete state misses dimensions {missing}")
            if not row_summary:
                if not cons.satisfied_by(fixed):
                    return False
                continue
            pools = [summaries[v] for v in row_summary]
            if any(not pool for pool in pools):
                continue  # empty string: vacuously satisfied
            for combo in itertools.product(*pools):
                point = dict(fixed)
                point.update({v: F(c) for v, c in zip(row_summary, combo)})
                if not cons.satisfied_by(point):
                    return False
        return True

    def relation_lines(self, display: dict[str, str]) -> list[str]:
        lines = []
        for cons in self.poly.rows:
            if len(cons.coeffs) < 2:
                continue  # single-variable facts are shown as intervals
            lines.append(_render_cons(cons, display))
        return lines


def _render_cons(cons: PD.LinCons, display: dict[str, str]) -> str:
    coeffs = {display.get(v, v): c for v, c in cons.coeffs}
    const = cons.const
    if const.denominator != 1:
        scale = const.denominator
        coeffs = {v: c * scale for v, c in coeffs.items()}
        const = const * scale
    if cons.op == PD.EQ:
        greatest = max(coeffs)
        if coeffs[greatest] < 0:
            coeffs = {v: -c for v, c in coeffs.items()}
            const = -const
    positives = sorted(v for v, c in coeffs.items() if c > 0)
    negatives = sorted(v for v, c in coeffs.items() if c < 0)

    def term(v: str) -> str:
        c = abs(coeffs[v])
        return v if c == 1 else f"{c}*{v}"

    parts: list[str] = []
    for v in positives:
        parts.append(term(v) if not parts else f"+ {term(v)}")
    for v in negatives:
        parts.append(f"- {term(v)}" if parts else f"-{term(v)}")
    op = "=" if cons.op == PD.EQ else "≤"
    return f"{' '.join(parts)} {op} {int(const) if const.denominator == 1 else const}"


# --- abstract environment -------------------------------------------------------

Block = tuple[tuple[str, str], ...]  # (internal name, declared type)
Frame = tuple[str, tuple[Block, ...]]  # (name prefix, blocks)


@dataclass(frozen=True)
class AbstractEnv:
    settings: EnvSettings
    backend: NumericBackend
    powersets: dict[str, StringPowerset]
    scopes: tuple[Frame, ...]

    # --- construction / basics ---

    @staticmethod
    def initial(settings: EnvSettings) -> "AbstractEnv":
        backend: NumericBackend
        if settings.backend == "polyhedra":
            backend = PolyBackend.make(settings)
        else:
            backend = NonRelBackend.make(settings)
        return AbstractEnv(settings, backend, {}, (("", ((),)),))

    def is_bottom(self) -> bool:
        return self.backend.is_bottom()

    def bottomize(self) -> "AbstractEnv":
        return replace(self, backend=self.backend.bottomize())

    @property
    def prefix(self) -> str:
        return self.scopes[-1][0]

    def resolve(self, name: str) -> str:
        return self.prefix + name

    def live_vars(self) -> list[tuple[str, str]]:
        out = []
        for _, blocks in self.scopes:
            for block in blocks:
                out.extend(block)
        return out

    def lookup_type(self, internal: str) -> str | None:
        for name, ty in self.live_vars():
            if name == internal:
                return ty
        return None

    def ghosts_of(self, internal: str) -> list[str]:
        ghosts = []
        if self.settings.has_length:
            ghosts.append(ghost_len(internal))
        if self.settings.has_summary:
            ghosts.append(ghost_ord(internal))
        return ghosts

    def expected_dims(self) -> frozenset[str]:
        dims: set[str] = set()
        for name, ty in self.live_vars():
            if ty == S.INT:
                dims.add(name)
            else:
                dims.update(self.ghosts_of(name))
        return frozenset(dims)

    # --- scope management ---

    def push_block(self) -> "AbstractEnv":
        prefix, blocks = self.scopes[-1]
        return replace(self, scopes=self.scopes[:-1] + ((prefix, blocks + ((),)),))

    def pop_block(self) -> "AbstractEnv":
        prefix, blocks = self.scopes[-1]
        dead = blocks[-1]
        env = self._remove_vars(dead)
        return replace(env, scopes=env.scopes[:-1] + ((prefix, blocks[:-1]),))

    def push_frame(self, prefix: str) -> "AbstractEnv":
        return replace(self, scopes=self.scopes + ((prefix, ((),)),))

    def pop_frame(self) -> "AbstractEnv":
        _, blocks = self.scopes[-1]
        env = self
        for block in blocks:
            env = env._remove_vars(block)
        return replace(env, scopes=env.scopes[:-1])

    def _remove_vars(self, block: Block) -> "AbstractEnv":
        dims: list[str] = []
        powersets = dict(self.powersets)
        for name, ty in block:
            if ty == S.INT:
                dims.append(name)
            else:
                dims.extend(self.ghosts_of(name))
                powersets.pop(name, None)
        backend = self.backend.remove_dims(dims) if dims else self.backend
        return replace(self, backend=backend, powersets=powersets)

    def declare(self, name: str, ty: str) -> "AbstractEnv":
        """Declare in the current block with the language default value
        (0 for int, "" for str); an initializer assignment may follow."""
        internal = self.resolve(name)
        prefix, blocks = self.scopes[-1]
        scopes = self.scopes[:-1] + ((prefix, blocks[:-1] + (blocks[-1] + ((internal, ty),),)),)
        env = replace(self, scopes=scopes)
        if ty == S.INT:
            zero = _int_lit(0)
            return replace(env, backend=env.backend.define(internal, zero))
        return env._str_fresh(internal, "")

    # --- numeric operations ---

    def assign_int(self, internal: str, e: S.Expr) -> "AbstractEnv":
        return replace(self, backend=self.backend.assign(internal, e))

    def define_temp(self, name: str, e: S.Expr) -> "AbstractEnv":
        return replace(self, backend=self.backend.define(name, e))

    def drop_temps(self, names) -> "AbstractEnv":
        names = [n for n in names if n in self.backend.dims()]
        if not names:
            return self
        return replace(self, backend=self.backend.remove_dims(names))

    def filter(self, cond: S.Expr, positive: bool = True) -> "AbstractEnv":
        return replace(self, backend=self.backend.filter(cond, positive))

    def bounds(self, e: S.Expr) -> Interval:
        return self.backend.bounds(e)

    def entails(self, cond: S.Expr) -> bool:
        """True when every state satisfies cond (refutes the negation)."""
        if self.is_bottom():
            return True
        return self.filter(cond, positive=False).is_bottom()

    # --- string operations ---

    def powerset_of(self, internal: str) -> StringPowerset:
        if not self.settings.has_powerset:
            return StringPowerset.top()
        return self.powersets.get(internal, StringPowerset.top())

    def _set_powerset(self, internal: str, value: StringPowerset) -> "AbstractEnv":
        if not self.settings.has_powerset:
            return self
        powersets = dict(self.powersets)
        powersets[internal] = value
        return replace(self, powersets=powersets)

    def _str_fresh(self, handle: str, literal: str) -> "AbstractEnv":
        env = self
        backend = env.backend
        if env.settings.has_length:
            backend = backend.define(ghost_len(handle), _int_lit(len(literal)))
        if env.settings.has_summary:
            backend = backend.add_dims([ghost_ord(handle)])
            if literal:
                codes = [ord(c) for c in literal]
                backend = backend.assume_le({ghost_ord(handle): -1}, -min(codes))
                backend = backend.assume_le({ghost_ord(handle): 1}, max(codes))
        env = replace(env, backend=backend)
        return env._set_powerset(handle, StringPowerset.of(literal))

    def str_define_literal(self, handle: str, text: str) -> "AbstractEnv":
        return self._str_fresh(handle, text)._reduce_string(handle)

    def str_define_copy(self, handle: str, src: str) -> "AbstractEnv":
        backend = self.backend
        if self.settings.has_length:
            backend = backend.define(ghost_len(handle), _var(ghost_len(src)))
        if self.settings.has_summary:
            backend = backend.expand(ghost_ord(src), ghost_ord(handle))
        env = replace(self, backend=backend)
        return env._set_powerset(handle, self.powerset_of(src))

    def _provably_empty(self, handle: str) -> bool:
        if self.settings.has_length:
            if self.backend.bounds(_var(ghost_len(handle))) == Interval.const(0):
                return True
        pws = self.powerset_of(handle)
        return pws.is_finite() and all(m == "" for m in pws.members)

    def str_define_concat(self, handle: str, a: str, b: str) -> "AbstractEnv":
        backend = self.backend
        if self.settings.has_length:
            lengths = S.Binary(
                _LOC, op="+", lhs=_var(ghost_len(a)), rhs=_var(ghost_len(b))
            )
            lengths.ty = S.INT
            backend = backend.define(ghost_len(handle), lengths)
        if self.settings.has_summary:
            parts = [h for h in (a, b) if not self._provably_empty(h)]
            if not parts:
                backend = backend.add_dims([ghost_ord(handle)])
            elif len(parts) == 1:
                backend = backend.expand(ghost_ord(parts[0]), ghost_ord(handle))
            else:
                backend = backend.expand(ghost_ord(a), "__cat_a__")
                backend = backend.expand(ghost_ord(b), "__cat_b__")
                backend = backend.fold(["__cat_a__", "__cat_b__"], "__cat_a__")
                backend = backend.rename({"__cat_a__": ghost_ord(handle)})
        env = replace(self, backend=backend)
        pws = powerset_concat(
            self.powerset_of(a), self.powerset_of(b), self.settings.powerset_bound
        )
        return env._set_powerset(handle, pws)._reduce_string(handle)

    def str_define_char(self, handle: str, code: S.Expr) -> "AbstractEnv":
        backend = self.backend
        if self.settings.has_length:
            backend = backend.define(ghost_len(handle), _int_lit(1))
        if self.settings.has_summary:
            backend = backend.define(ghost_ord(handle), code)
        env = replace(self, backend=backend)
        iv = self.backend.bounds(code)
        if iv.is_const() and 0 <= iv.lo <= 127:
            pws = StringPowerset.of(chr(iv.lo))  # type: ignore[arg-type]
        else:
            pws = StringPowerset.top()
        return env._set_powerset(handle, pws)._reduce_string(handle)

    def str_assign_from_handle(self, dst: str, handle: str) -> "AbstractEnv":
        if dst == handle:
            return self
        env = self
        ghost_dims = env.ghosts_of(dst)
        backend = env.backend.remove_dims(ghost_dims) if ghost_dims else env.backend
        mapping = {}
        if env.settings.has_length:
            mapping[ghost_len(handle)] = ghost_len(dst)
        if env.settings.has_summary:
            mapping[ghost_ord(handle)] = ghost_ord(dst)
        if mapping:
            backend = backend.rename(mapping)
        env = replace(env, backend=backend)
        powersets = dict(env.powersets)
        if env.settings.has_powerset and handle in powersets:
            powersets[dst] = powersets.pop(handle)
        return replace(env, powersets=powersets)._reduce_string(dst)

    def str_drop(self, handle: str) -> "AbstractEnv":
        dims = [d for d in self.ghosts_of(handle) if d in self.backend.dims()]
        backend = self.backend.remove_dims(dims) if dims else self.backend
        powersets = dict(self.powersets)
        powersets.pop(handle, None)
        return replace(self, backend=backend, powersets=powersets)

    def str_length_expr(self, handle: str, temp: str) -> tuple["AbstractEnv", S.Expr]:
        """Residual expression for |handle| (ghost read or bounded temp)."""
        if self.settings.has_length:
            return self, _var(ghost_len(handle))
        pws = self.powerset_of(handle)
        if pws.is_finite():
            lens = sorted(len(m) for m in pws.members)
            iv = Interval(lens[0], lens[-1])
        else:
            iv = Interval(0, POS_INF)
        backend = self.backend.add_dims([temp])
        if is_finite(iv.lo):
            backend = backend.assume_le({temp: -1}, -iv.lo)
        if is_finite(iv.hi):
            backend = backend.assume_le({temp: 1}, iv.hi)
        return replace(self, backend=backend), _var(temp)

    def str_index_define(
        self, base: str, temp: str, index_bounds: Interval | None = None
    ) -> "AbstractEnv":
        """Bind temp to the abstraction of a (checked) character read."""
        refine = Interval(0, 127)  # ASCII strings only
        pws = self.powerset_of(base)
        if pws.is_finite():
            codes = sorted(
                {
                    ord(c)
                    for m in pws.members
                    for i, c in enumerate(m)
                    if index_bounds is None or index_bounds.contains(i)
                }
            )
            if codes:
                refine = refine.meet(Interval(codes[0], codes[-1]))
            elif pws.members:
                # No member has a feasible position: unreachable read.
                return replace(self, backend=self.backend.bottomize().add_dims([temp]))
        if self.settings.has_summary:
            backend = self.backend.expand(ghost_ord(base), temp)
        else:
            backend = self.backend.add_dims([temp])
        if is_finite(refine.lo):
            backend = backend.assume_le({temp: -1}, -refine.lo)
        if is_finite(refine.hi):
            backend = backend.assume_le({temp: 1}, refine.hi)
        return replace(self, backend=backend)

    def str_equality(self, a: str, b: str) -> Interval:
        pa, pb = self.powerset_of(a), self.powerset_of(b)
        if pa.is_finite() and pb.is_finite():
            if len(pa.members) == 1 and pa.members == pb.members:
                return Interval.const(1)
            if not (pa.members & pb.members):
                return Interval.const(0)
        if self.settings.has_length:
            la = self.bounds(_var(ghost_len(a)))
            lb = self.bounds(_var(ghost_len(b)))
            if la.meet(lb).is_bottom:
                return Interval.const(0)
        return Interval(0, 1)

    def _reduce_string(self, internal: str) -> "AbstractEnv":
        """Reduced-product exchange between the powerset and the ghosts."""
        if not (self.settings.string_reduction and self.settings.has_powerset):
            return self
        if self.is_bottom():
            return self
        pws = self.powerset_of(internal)
        if not pws.is_finite():
            return self
        members = set(pws.members)
        if self.settings.has_length:
            iv = self.bounds(_var(ghost_len(internal)))
            members = {m for m in members if iv.contains(len(m))}
        if self.settings.has_summary:
            iv = self.bounds(_var(ghost_ord(internal)))
            members = {
                m for m in members if all(iv.contains(ord(c)) for c in m)
            }
        if not members:
            return self.bottomize()
        env = self._set_powerset(internal, StringPowerset(frozenset(members)))
        backend = env.backend
        if env.settings.has_length:
            lens = sorted(len(m) for m in members)
            if lens[0] == lens[-1]:
                backend = backend.assume_eq({ghost_len(internal): 1}, lens[0])
            else:
                backend = backend.assume_le({ghost_len(internal): -1}, -lens[0])
                backend = backend.assume_le({ghost_len(internal): 1}, lens[-1])
        if env.settings.has_summary:
            codes = sorted({ord(c) for m in members for c in m})
            if codes:
                backend = backend.assume_le({ghost_ord(internal): -1}, -codes[0])
                backend = backend.assume_le({ghost_ord(internal): 1}, codes[-1])
        return replace(env, backend=backend)

    # --- lattice ---

    def join(self, other: "AbstractEnv") -> "AbstractEnv":
        if self.is_bottom():
            return other
        if other.is_bottom():
            return self
        assert self.scopes == other.scopes, "join across different scopes"
        powersets = _merge_powersets(
            self.powersets, other.powersets, self.settings.powerset_bound
        )
        return replace(self, backend=self.backend.join(other.backend), powersets=powersets)

    def widen(self, other: "AbstractEnv", thresholds: tuple[int, ...] = ()) -> "AbstractEnv":
        if self.is_bottom():
            return other
        if other.is_bottom():
            return self
        assert self.scopes == other.scopes
        powersets = _merge_powersets(
            self.powersets, other.powersets, self.settings.powerset_bound
        )
        return replace(
            self, backend=self.backend.widen(other.backend, thresholds), powersets=powersets
        )

    def meet(self, other: "AbstractEnv") -> "AbstractEnv":
        if self.is_bottom() or other.is_bottom():
            return self.bottomize()
        assert self.scopes == other.scopes
        powersets = dict(other.powersets)
        for var, pws in self.powersets.items():
            if var in powersets:
                if pws.is_finite() and powersets[var].is_finite():
                    inter = pws.members & powersets[var].members
                    if not inter:
                        return self.bottomize()
                    powersets[var] = StringPowerset(inter)
                elif pws.is_finite():
                    powersets[var] = pws
            else:
                powersets[var] = pws
        return replace(self, backend=self.backend.meet(other.backend), powersets=powersets)

    def leq(self, other: "AbstractEnv") -> bool:
        if self.is_bottom():
            return True
        if other.is_bottom():
            return False
        from ..domains.strings import powerset_leq

        for var, pws in other.powersets.items():
            if not powerset_leq(self.powerset_of(var), pws):
                return False
        return self.backend.leq(other.backend)

    # --- oracle interface ---

    def contains(self, state: dict[str, object]) -> bool:
        """Does this abstract value describe the concrete (toplevel) state?"""
        if self.is_bottom():
            return False
        values: dict[str, int] = {}
        summaries: dict[str, list[int]] = {}
        for name, ty in self.live_vars():
            if name not in state:
                continue
            if ty == S.INT:
                values[name] = int(state[name])  # type: ignore[arg-type]
            else:
                text = str(state[name])
                if not self.powerset_of(name).contains(text):
                    return False
                if self.settings.has_length:
                    values[ghost_len(name)] = len(text)
                if self.settings.has_summary:
                    summaries[ghost_ord(name)] = [ord(c) for c in text]
        return self.backend.contains_point(values, summaries)

    # --- rendering ---

    def render_lines(self, only: list[str] | None = None) -> list[str]:
        if self.is_bottom():
            return ["⊥"]
        live = self.live_vars()
        if only is not None:
            wanted = set(only)
            live = [(n, t) for n, t in live if n in wanted or _strip_prefix(n) in wanted]
        lines: list[str] = []
        if self.settings.has_powerset:
            for name, ty in sorted(live):
                if ty == S.STR:
                    lines.append(f"{name} ∈ {self.powerset_of(name)}")
        numeric: list[str] = []
        for name, ty in live:
            if ty == S.INT:
                numeric.append(name)
            else:
                numeric.extend(g for g in self.ghosts_of(name))
        for name in sorted(numeric):
            iv = self.backend.bounds(_var(name))
            lines.append(f"{name} ∈ {_render_interval(iv)}")
            congr = self.backend.congruence(name)
            if congr is not None and not congr.is_bottom and congr.modulus >= 2:
                lines.append(f"{name} ≡ {congr.remainder} [{congr.modulus}]")
        if only is None:
            lines.extend(self.backend.relation_lines({}))
        else:
            shown = set(numeric)
            lines.extend(
                line
                for line in self.backend.relation_lines({})
                if any(v in line for v in shown)
            )
        return lines


def _strip_prefix(name: str) -> str:
    return name.rsplit(".", 1)[-1]


def _render_interval(iv: Interval) -> str:
    if iv.is_bottom:
        return "⊥"
    if iv.is_top():
        return "⊤"
    lo = "-∞" if iv.lo == NEG_INF else str(iv.lo)
    hi = "+∞" if iv.hi == POS_INF else str(iv.hi)
    return f"[{lo}, {hi}]"


def _merge_powersets(
    a: dict[str, StringPowerset], b: dict[str, StringPowerset], k: int
) -> dict[str, StringPowerset]:
    out: dict[str, StringPowerset] = {}
    for var in set(a) | set(b):
        out[var] = powerset_join(
            a.get(var, StringPowerset.top()), b.get(var, StringPowerset.top()), k
        )
    return out


_LOC = SourceLoc("<synthetic>", 1, 1)


def _int_lit(v: int) -> S.Expr:
    lit = S.IntLit(_LOC, value=v)
    lit.ty = S.INT
    return lit


def _var(name: str) -> S.Expr:
    var = S.Var(_LOC, name=name)
    var.ty = S.INT
    return var
