"""Constraint-only convex polyhedra over rationals.

Constraints are kept in a canonical form: integer coefficients with gcd 1
(constants may be rational), equalities in reduced row-echelon shape with
inequalities rewritten modulo them, no duplicates, no redundant rows.
Projection and convex hull use Fourier-Motzkin elimination with Imbert's
history bound to prune combinatorial garbage; entailment, satisfiability
and bound queries use the exact simplex.

Joins compute the closed convex hull through the classic lifted encoding:
scaled copies of both operands glued by x = y + z and a mixing ratio,
then auxiliary dimensions eliminated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .intervals import Interval, NEG_INF, POS_INF
from . import simplex

F = Fraction

LE = "<="
EQ = "=="

# Fourier-Motzkin intermediate-size guard (soundly drops rows when hit).
FM_ROW_CAP = 2000

LossHook = Optional[Callable[[str], None]]

# All operations are pure, and fixpoint iteration repeats identical
# transfers, so results (with any precision-loss messages) are memoized.
_MEMO_CAP = 50000
_memo: dict = {}


def _memoized(key, on_loss: LossHook, thunk):
    hit = _memo.get(key)
    if hit is None:
        losses: list[str] = []
        result = thunk(losses.append)
        if len(_memo) >= _MEMO_CAP:
            _memo.clear()
        _memo[key] = hit = (result, tuple(losses))
    result, losses = hit
    if on_loss is not None:
        for message in losses:
            on_loss(message)
    return result


@dataclass(frozen=True)
class LinCons:
    """Sum(coeffs[v] * v) op const, coefficients integer with gcd 1."""

    coeffs: tuple[tuple[str, int], ...]  # sorted by variable name
    op: str  # LE | EQ
    const: Fraction

    def coeff_map(self) -> dict[str, Fraction]:
        return {v: F(c) for v, c in self.coeffs}

    def vars(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def as_row(self) -> simplex.Row:
        return self.coeff_map(), self.op, self.const

    def eval_at(self, point: dict[str, Fraction]) -> Fraction:
        return sum((c * point.get(v, F(0)) for v, c in self.coeffs), F(0))

    def satisfied_by(self, point: dict[str, Fraction]) -> bool:
        value = self.eval_at(point)
        return value == self.const if self.op == EQ else value <= self.const

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*{v}" for v, c in self.coeffs)
        return f"{terms} {self.op} {self.const}"


def make_cons(coeffs: dict[str, Fraction | int], op: str, const) -> LinCons | None:
    """Normalize a raw row; returns None for tautologies.

    Raises ValueError on an unsatisfiable constant row so callers notice.
    """
    clean = {v: F(c) for v, c in coeffs.items() if c != 0}
    const = F(const)
    if not clean:
        sat = const == 0 if op == EQ else const >= 0
        if sat:
            return None
        raise ValueError("unsatisfiable constant constraint")
    scale = math.lcm(*(c.denominator for c in clean.values()))
    ints = {v: int(c * scale) for v, c in clean.items()}
    const = const * scale
    g = math.gcd(*(abs(c) for c in ints.values()))
    ints = {v: c // g for v, c in ints.items()}
    const = const / g
    if op == EQ:
        first = min(ints)
        if ints[first] < 0:
            ints = {v: -c for v, c in ints.items()}
            const = -const
    return LinCons(tuple(sorted(ints.items())), op, const)


@dataclass(frozen=True)
class Polyhedron:
    dims: tuple[str, ...]  # sorted
    rows: tuple[LinCons, ...]
    bottom: bool = False

    def is_bottom(self) -> bool:
        return self.bottom

    def is_top(self) -> bool:
        return not self.bottom and not self.rows

    def constraints(self) -> list[LinCons]:
        return list(self.rows)

    def __repr__(self) -> str:
        if self.bottom:
            return f"Poly⊥{list(self.dims)}"
        return f"Poly{list(self.dims)}{list(self.rows)}"


def poly_top(dims: Iterable[str]) -> Polyhedron:
    return Polyhedron(tuple(sorted(set(dims))), ())


def poly_bottom(dims: Iterable[str]) -> Polyhedron:
    return Polyhedron(tuple(sorted(set(dims))), (), bottom=True)


# --- raw-row helpers ---------------------------------------------------------

Raw = tuple[dict[str, Fraction], str, Fraction]


def _to_raw(rows: Iterable[LinCons]) -> list[Raw]:
    return [(r.coeff_map(), r.op, r.const) for r in rows]


def _normalize_raws(raws: Iterable[Raw]) -> tuple[list[LinCons], bool]:
    """Returns (rows, contradiction_flag); drops tautologies and duplicates."""
    out: dict[LinCons, None] = {}
    for coeffs, op, const in raws:
        try:
            cons = make_cons(coeffs, op, const)
        except ValueError:
            return [], True
        if cons is not None:
            out[cons] = None
    return list(out), False


def _subst(raws: list[Raw], var: str, expr: dict[str, Fraction], const: Fraction) -> list[Raw]:
    """Replace var by expr + const in every row; expr must not mention var."""
    result = []
    for coeffs, op, k in raws:
        c = coeffs.get(var)
        if not c:
            result.append((dict(coeffs), op, k))
            continue
        new = {w: coeffs.get(w, F(0)) + c * expr.get(w, F(0)) for w in set(coeffs) | set(expr)}
        new.pop(var, None)
        result.append((new, op, k - c * const))
    return result


# --- Fourier-Motzkin elimination ---------------------------------------------


def _eliminate_all(
    raws: list[Raw], kill: Iterable[str], cap: int = FM_ROW_CAP, on_loss: LossHook = None
) -> list[Raw] | None:
    """Eliminate the `kill` variables; returns None on contradiction.

    Equalities mentioning a killed variable are used for Gaussian
    substitution first; the remaining pure-inequality eliminations run
    Fourier-Motzkin with Imbert's |history| <= steps+1 redundancy bound.
    """
    kill = set(kill)

    # Gaussian pass over equalities.
    progress = True
    while progress:
        progress = False
        for idx, (coeffs, op, k) in enumerate(raws):
            if op != EQ:
                continue
            var = next((v for v in coeffs if v in kill and coeffs[v]), None)
            if var is None:
                continue
            c = coeffs[var]
            expr = {w: -cw / c for w, cw in coeffs.items() if w != var}
            raws = _subst(raws[:idx] + raws[idx + 1:], var, expr, k / c)
            kill.discard(var)
            progress = True
            break

    rows, contradiction = _normalize_raws(raws)
    if contradiction:
        return None
    if not kill:
        return _to_raw(rows)

    # Pure FM with histories.
    tagged: dict[LinCons, frozenset[int]] = {r: frozenset([i]) for i, r in enumerate(rows)}
    steps = 0
    remaining = set(kill)
    while remaining:
        var = min(
            remaining,
            key=lambda v: (
                sum(1 for r in tagged if dict(r.coeffs).get(v, 0) > 0)
                * sum(1 for r in tagged if dict(r.coeffs).get(v, 0) < 0),
                v,
            ),
        )
        remaining.discard(var)
        steps += 1
        uppers: list[tuple[LinCons, frozenset[int]]] = []
        lowers: list[tuple[LinCons, frozenset[int]]] = []
        keep: dict[LinCons, frozenset[int]] = {}
        for cons, hist in tagged.items():
            c = dict(cons.coeffs).get(var, 0)
            if c == 0:
                keep[cons] = hist
            elif c > 0:
                uppers.append((cons, hist))
            else:
                lowers.append((cons, hist))
        for ucons, uhist in uppers:
            uc = dict(ucons.coeffs)[var]
            for lcons, lhist in lowers:
                hist = uhist | lhist
                if len(hist) > steps + 1:
                    continue  # Imbert: provably redundant
                lc = -dict(lcons.coeffs)[var]
                combined: dict[str, Fraction] = {}
                for v, c in ucons.coeffs:
                    if v != var:
                        combined[v] = F(c, uc)
                for v, c in lcons.coeffs:
                    if v != var:
                        combined[v] = combined.get(v, F(0)) + F(c, lc)
                const = ucons.const / uc + lcons.const / lc
                try:
                    cons = make_cons(combined, LE, const)
                except ValueError:
                    return None
                if cons is None:
                    continue
                prev = keep.get(cons)
                if prev is None or len(hist) < len(prev):
                    keep[cons] = hist
        if len(keep) > cap:
            if on_loss is not None:
                on_loss(f"constraint cap hit while eliminating {var}; dropping rows")
            ordered = sorted(
                keep.items(),
                key=lambda item: (len(item[0].coeffs), sum(abs(c) for _, c in item[0].coeffs)),
            )
            keep = dict(ordered[:cap])
        tagged = keep
    return _to_raw(list(tagged))


# --- canonicalization ---------------------------------------------------------


def _var_box(rows: list[LinCons]) -> dict[str, list[Fraction | None]]:
    """Per-variable bounds harvested from single-variable rows."""
    box: dict[str, list[Fraction | None]] = {}
    for cons in rows:
        if len(cons.coeffs) != 1:
            continue
        (v, c), = cons.coeffs
        entry = box.setdefault(v, [None, None])
        bound = cons.const / c
        if cons.op == EQ:
            entry[0] = bound if entry[0] is None else max(entry[0], bound)
            entry[1] = bound if entry[1] is None else min(entry[1], bound)
        elif c > 0:
            entry[1] = bound if entry[1] is None else min(entry[1], bound)
        else:
            entry[0] = bound if entry[0] is None else max(entry[0], bound)
    return box


def _entails(rows: list[LinCons], variables: list[str], cons: LinCons) -> bool:
    row_set = set(rows)
    if cons in row_set:
        return True
    if cons.op == LE:
        for row in rows:
            if row.coeffs == cons.coeffs and row.const <= cons.const:
                return True
        # Interval-arithmetic shortcut over the syntactic bounding box.
        box = _var_box(rows)
        total = F(0)
        for v, c in cons.coeffs:
            lo, hi = box.get(v, (None, None))
            bound = hi if c > 0 else lo
            if bound is None:
                total = None
                break
            total += c * bound
        if total is not None and total <= cons.const:
            return True
    raws = _to_raw(rows)
    coeffs = cons.coeff_map()
    status, val = simplex.lp_max(raws, coeffs, variables)
    if status == simplex.INFEASIBLE:
        return True
    if status == simplex.UNBOUNDED or val > cons.const:
        return False
    if cons.op == LE:
        return True
    status, val = simplex.lp_min(raws, coeffs, variables)
    return status == simplex.OPTIMAL and val == cons.const


def _echelon_substitute(
    variables: list[str], eqs: list[Raw], ineqs: list[Raw]
) -> tuple[list[tuple[str, dict[str, Fraction], Fraction]], list[Raw], bool]:
    """Row-echelon the equalities, rewriting everything modulo them.

    Returns (echelon, reduced_ineqs, contradiction). Each echelon entry is
    (leading var, expression, const) with var = expression + const, the
    expression using only later, non-pivot variables.
    """
    echelon: list[tuple[str, dict[str, Fraction], Fraction]] = []
    pending = [(dict(c), op, k) for c, op, k in eqs]
    ineqs = [(dict(c), op, k) for c, op, k in ineqs]
    for var in variables:
        nxt: list[Raw] = []
        chosen = None
        for coeffs, op, k in pending:
            if chosen is None and coeffs.get(var):
                chosen = (coeffs, k)
            else:
                nxt.append((coeffs, op, k))
        if chosen is not None:
            coeffs, k = chosen
            c = coeffs[var]
            expr = {w: -cw / c for w, cw in coeffs.items() if w != var and cw != 0}
            const = k / c
            nxt = _subst(nxt, var, expr, const)
            ineqs = _subst(ineqs, var, expr, const)
            echelon = [
                (lv, *_subst_one(lc, lk, var, expr, const)) for lv, lc, lk in echelon
            ]
            echelon.append((var, expr, const))
        pending = nxt
    for coeffs, op, k in pending:  # leftovers are constant rows
        if any(c != 0 for c in coeffs.values()):
            continue  # unreachable: every variable had a pivot chance
        if k != 0:
            return [], [], True
    return echelon, ineqs, False


def _subst_one(
    expr: dict[str, Fraction], const: Fraction, var: str, repl: dict[str, Fraction], repl_const: Fraction
) -> tuple[dict[str, Fraction], Fraction]:
    c = expr.get(var)
    if not c:
        return expr, const
    new = {w: expr.get(w, F(0)) + c * repl.get(w, F(0)) for w in set(expr) | set(repl)}
    new.pop(var, None)
    return {w: cw for w, cw in new.items() if cw != 0}, const + c * repl_const


def _canonicalize(dims: tuple[str, ...], raws: list[Raw]) -> Polyhedron:
    variables = list(dims)
    rows, contradiction = _normalize_raws(raws)
    if contradiction:
        return poly_bottom(dims)
    if not rows:
        return poly_top(dims)

    eqs = [r.as_row() for r in rows if r.op == EQ]
    ineq_list = [r.as_row() for r in rows if r.op == LE]
    echelon, ineq_raws, contradiction = _echelon_substitute(variables, eqs, ineq_list)
    if contradiction:
        return poly_bottom(dims)
    ineq_rows, contradiction = _normalize_raws(ineq_raws)
    if contradiction:
        return poly_bottom(dims)

    point = simplex.feasible_point(_to_raw(ineq_rows), variables)
    if point is None:
        return poly_bottom(dims)

    # Implicit equalities are tight at every feasible point, so only rows
    # tight at the sample point need an LP check.
    promoted: list[LinCons] = []
    for cons in ineq_rows:
        if cons.eval_at(point) == cons.const and _entails(
            ineq_rows, variables, LinCons(cons.coeffs, EQ, cons.const)
        ):
            promoted.append(cons)
    if promoted:
        rebuilt: list[Raw] = [
            (_expr_to_row(var, expr), EQ, const) for var, expr, const in echelon
        ]
        for cons in promoted:
            rebuilt.append((cons.coeff_map(), EQ, cons.const))
        for cons in ineq_rows:
            if cons not in promoted:
                rebuilt.append(cons.as_row())
        return _canonicalize(dims, rebuilt)

    # Remove redundant inequalities greedily (deterministic order).
    ineq_rows.sort(key=_sort_key)
    kept: list[LinCons] = []
    pool = list(ineq_rows)
    for i, cons in enumerate(ineq_rows):
        others = kept + pool[i + 1:]
        if not _entails(others, variables, cons):
            kept.append(cons)

    final: list[LinCons] = []
    for var, expr, const in echelon:
        cons = make_cons(_expr_to_row(var, expr), EQ, const)
        assert cons is not None
        final.append(cons)
    final.extend(kept)
    final.sort(key=_sort_key)
    return Polyhedron(dims, tuple(final))


def _expr_to_row(var: str, expr: dict[str, Fraction]) -> dict[str, Fraction]:
    row = {w: -c for w, c in expr.items()}
    row[var] = F(1)
    return row


def _sort_key(cons: LinCons):
    return (cons.op != EQ, cons.coeffs, cons.const)


# --- public operations -----------------------------------------------------


def _assume_impl(P: Polyhedron, cons: LinCons) -> Polyhedron:
    if P.bottom:
        return P
    unknown = cons.vars() - set(P.dims)
    if unknown:
        raise KeyError(f"unknown dimensions {sorted(unknown)}")
    return _canonicalize(P.dims, _to_raw(P.rows) + [cons.as_row()])


def _assume_all_impl(P: Polyhedron, conses: tuple[LinCons, ...]) -> Polyhedron:
    if P.bottom:
        return P
    conses = list(conses)
    for c in conses:
        unknown = c.vars() - set(P.dims)
        if unknown:
            raise KeyError(f"unknown dimensions {sorted(unknown)}")
    return _canonicalize(P.dims, _to_raw(P.rows) + [c.as_row() for c in conses])


def poly_add_dims(P: Polyhedron, names: Iterable[str]) -> Polyhedron:
    dims = tuple(sorted(set(P.dims) | set(names)))
    return Polyhedron(dims, P.rows, P.bottom)


def _project_impl(P: Polyhedron, keep: frozenset[str], on_loss: LossHook) -> Polyhedron:
    keep = set(keep)
    assert keep <= set(P.dims)
    new_dims = tuple(sorted(keep))
    if P.bottom:
        return poly_bottom(new_dims)
    kill = [v for v in P.dims if v not in keep]
    if not kill:
        return P
    raws = _eliminate_all(_to_raw(P.rows), kill, on_loss=on_loss)
    if raws is None:
        return poly_bottom(new_dims)
    return _canonicalize(new_dims, raws)


def poly_rename(P: Polyhedron, mapping: dict[str, str]) -> Polyhedron:
    """Bijective renaming of dimensions."""
    dims = tuple(sorted(mapping.get(v, v) for v in P.dims))
    assert len(dims) == len(P.dims)
    if P.bottom:
        return poly_bottom(dims)
    raws = [
        ({mapping.get(v, v): c for v, c in coeffs.items()}, op, k)
        for coeffs, op, k in _to_raw(P.rows)
    ]
    rows, _ = _normalize_raws(raws)
    rows.sort(key=_sort_key)
    return Polyhedron(dims, tuple(rows))


def _assign_impl(P: Polyhedron, var: str, coeffs: dict[str, Fraction], const: Fraction, on_loss: LossHook) -> Polyhedron:
    """Exact image of `var := coeffs . dims + const`."""
    if P.bottom:
        return P
    assert var in P.dims
    coeffs = {v: F(c) for v, c in coeffs.items() if c != 0}
    const = F(const)
    unknown = set(coeffs) - set(P.dims)
    if unknown:
        raise KeyError(f"unknown dimensions {sorted(unknown)}")
    a = coeffs.get(var, F(0))
    tmp = "__assign__"
    assert tmp not in P.dims
    if a != 0:
        # Invertible: old var = (new var - rest)/a. The new var is routed
        # through a temp name so _subst does not conflate the two.
        expr = {w: -c / a for w, c in coeffs.items() if w != var}
        expr[tmp] = F(1) / a
        raws = _subst(_to_raw(P.rows), var, expr, -const / a)
        raws = [
            ({(var if v == tmp else v): c for v, c in row.items()}, op, k)
            for row, op, k in raws
        ]
        return _canonicalize(P.dims, raws)
    raws = _to_raw(P.rows)
    eq = dict(coeffs)
    eq[tmp] = F(-1)
    raws.append((eq, EQ, -const))
    raws = _eliminate_all(raws, [var], on_loss=on_loss)
    if raws is None:
        return poly_bottom(P.dims)
    raws = [
        ({(var if v == tmp else v): c for v, c in row.items()}, op, k)
        for row, op, k in raws
    ]
    return _canonicalize(P.dims, raws)


def _havoc_impl(P: Polyhedron, var: str, on_loss: LossHook) -> Polyhedron:
    """Forget everything about var (non-deterministic assignment)."""
    if P.bottom:
        return P
    raws = _eliminate_all(_to_raw(P.rows), [var], on_loss=on_loss)
    if raws is None:
        return poly_bottom(P.dims)
    return _canonicalize(P.dims, raws)


def _join_impl(P: Polyhedron, Q: Polyhedron, on_loss: LossHook) -> Polyhedron:
    """Closed convex hull via the lifted-encoding projection."""
    assert P.dims == Q.dims, (P.dims, Q.dims)
    if P.bottom:
        return Q
    if Q.bottom:
        return P
    if poly_leq(P, Q):
        return Q
    if poly_leq(Q, P):
        return P
    dims = P.dims
    y = {v: f"__y_{v}" for v in dims}
    sigma = "__sigma"
    raws: list[Raw] = []
    # P scaled by sigma on the y copy: A.y op sigma * b.
    for coeffs, op, k in _to_raw(P.rows):
        row = {y[v]: c for v, c in coeffs.items()}
        row[sigma] = -k
        raws.append((row, op, F(0)))
    # Q scaled by (1 - sigma) on the (x - y) copy: A.(x - y) op (1 - sigma) * b.
    for coeffs, op, k in _to_raw(Q.rows):
        row = {}
        for v, c in coeffs.items():
            row[v] = c
            row[y[v]] = row.get(y[v], F(0)) - c
        row[sigma] = row.get(sigma, F(0)) + k
        raws.append((row, op, k))
    raws.append(({sigma: F(1)}, LE, F(1)))
    raws.append(({sigma: F(-1)}, LE, F(0)))
    kill = [sigma] + [y[v] for v in dims]
    result = _eliminate_all(raws, kill, on_loss=on_loss)
    if result is None:  # cannot happen for non-bottom operands
        return poly_bottom(dims)
    return _canonicalize(dims, result)


def _widen_impl(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    """Keep the constraints of P that Q entails (equalities split in two)."""
    assert P.dims == Q.dims
    if P.bottom:
        return Q
    if Q.bottom:
        return P
    q_rows = list(Q.rows)
    variables = list(P.dims)
    kept: list[Raw] = []
    for cons in P.rows:
        if cons.op == EQ:
            halves = [
                LinCons(cons.coeffs, LE, cons.const),
                make_cons({v: -c for v, c in cons.coeffs}, LE, -cons.const),
            ]
        else:
            halves = [cons]
        for half in halves:
            assert half is not None
            if _entails(q_rows, variables, half):
                kept.append(half.as_row())
    return _canonicalize(P.dims, kept)


def _leq_impl(P: Polyhedron, Q: Polyhedron) -> bool:
    assert P.dims == Q.dims
    if P.bottom:
        return True
    if Q.bottom:
        return False
    p_rows = list(P.rows)
    variables = list(P.dims)
    return all(_entails(p_rows, variables, cons) for cons in Q.rows)


def _meet_impl(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    assert P.dims == Q.dims
    if P.bottom or Q.bottom:
        return poly_bottom(P.dims)
    return _canonicalize(P.dims, _to_raw(P.rows) + _to_raw(Q.rows))


def _expand_impl(P: Polyhedron, var: str, fresh: str) -> Polyhedron:
    """Duplicate var's constraints onto a fresh dimension (both kept)."""
    assert var in P.dims
    if fresh in P.dims:
        raise KeyError(f"dimension {fresh!r} already present")
    dims = tuple(sorted(P.dims + (fresh,)))
    if P.bottom:
        return poly_bottom(dims)
    raws = _to_raw(P.rows)
    for coeffs, op, k in list(raws):
        if var in coeffs:
            copy = dict(coeffs)
            copy[fresh] = copy.pop(var)
            raws.append((copy, op, k))
    rows, _ = _normalize_raws(raws)
    rows.sort(key=_sort_key)
    return Polyhedron(dims, tuple(rows))


def _fold_impl(P: Polyhedron, group: tuple[str, ...], into: str, on_loss: LossHook) -> Polyhedron:
    """Join of the projections keeping one group member at a time."""
    assert group and into in group
    assert set(group) <= set(P.dims)
    result: Polyhedron | None = None
    target_dims = sorted((set(P.dims) - set(group)) | {into})
    for g in group:
        keep = (set(P.dims) - set(group)) | {g}
        piece = poly_project(P, keep, on_loss)
        if g != into:
            piece = poly_rename(piece, {g: into})
        result = piece if result is None else poly_join(result, piece, on_loss)
    assert result is not None and list(result.dims) == target_dims
    return result


def _bounds_impl(P: Polyhedron, coeffs: dict[str, Fraction]) -> Interval:
    """Exact rational bounds of a linear expression; rounded to the
    enclosing integer interval (all program values are integers)."""
    if P.bottom:
        return Interval.bottom()
    coeffs = {v: F(c) for v, c in coeffs.items() if c != 0}
    if not coeffs:
        return Interval.const(0)
    raws = _to_raw(P.rows)
    variables = list(P.dims)
    status, hi = simplex.lp_max(raws, coeffs, variables)
    if status == simplex.INFEASIBLE:
        return Interval.bottom()
    status2, lo = simplex.lp_min(raws, coeffs, variables)
    hi_b = POS_INF if status == simplex.UNBOUNDED else math.floor(hi)
    lo_b = NEG_INF if status2 == simplex.UNBOUNDED else math.ceil(lo)
    return Interval.range(lo_b, hi_b)


# --- memoized public API -----------------------------------------------------


def _coeff_key(coeffs: dict) -> tuple:
    return tuple(sorted((v, F(c)) for v, c in coeffs.items() if c != 0))


def poly_assume(P: Polyhedron, cons: LinCons) -> Polyhedron:
    return _memoized(("assume", P, cons), None, lambda loss: _assume_impl(P, cons))


def poly_assume_all(P: Polyhedron, conses: Iterable[LinCons]) -> Polyhedron:
    conses = tuple(conses)
    return _memoized(
        ("assume_all", P, conses), None, lambda loss: _assume_all_impl(P, conses)
    )


def poly_project(P: Polyhedron, keep: Iterable[str], on_loss: LossHook = None) -> Polyhedron:
    keep = frozenset(keep)
    return _memoized(
        ("project", P, keep), on_loss, lambda loss: _project_impl(P, keep, loss)
    )


def poly_remove_dims(P: Polyhedron, names: Iterable[str], on_loss: LossHook = None) -> Polyhedron:
    return poly_project(P, set(P.dims) - set(names), on_loss)


def poly_assign(
    P: Polyhedron, var: str, coeffs: dict[str, Fraction | int], const, on_loss: LossHook = None
) -> Polyhedron:
    clean = {v: F(c) for v, c in coeffs.items() if c != 0}
    const = F(const)
    return _memoized(
        ("assign", P, var, _coeff_key(clean), const),
        on_loss,
        lambda loss: _assign_impl(P, var, clean, const, loss),
    )


def poly_havoc(P: Polyhedron, var: str, on_loss: LossHook = None) -> Polyhedron:
    return _memoized(("havoc", P, var), on_loss, lambda loss: _havoc_impl(P, var, loss))


def poly_join(P: Polyhedron, Q: Polyhedron, on_loss: LossHook = None) -> Polyhedron:
    return _memoized(("join", P, Q), on_loss, lambda loss: _join_impl(P, Q, loss))


def poly_widen(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    return _memoized(("widen", P, Q), None, lambda loss: _widen_impl(P, Q))


def poly_leq(P: Polyhedron, Q: Polyhedron) -> bool:
    return _memoized(("leq", P, Q), None, lambda loss: _leq_impl(P, Q))


def poly_equal(P: Polyhedron, Q: Polyhedron) -> bool:
    return poly_leq(P, Q) and poly_leq(Q, P)


def poly_meet(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    return _memoized(("meet", P, Q), None, lambda loss: _meet_impl(P, Q))


def poly_expand(P: Polyhedron, var: str, fresh: str) -> Polyhedron:
    return _memoized(
        ("expand", P, var, fresh), None, lambda loss: _expand_impl(P, var, fresh)
    )


def poly_fold(
    P: Polyhedron, group: list[str], into: str, on_loss: LossHook = None
) -> Polyhedron:
    group = tuple(group)
    return _memoized(
        ("fold", P, group, into), on_loss, lambda loss: _fold_impl(P, group, into, loss)
    )


def poly_bounds(P: Polyhedron, coeffs: dict[str, Fraction | int]) -> Interval:
    clean = {v: F(c) for v, c in coeffs.items() if c != 0}
    return _memoized(
        ("bounds", P, _coeff_key(clean)), None, lambda loss: _bounds_impl(P, clean)
    )
