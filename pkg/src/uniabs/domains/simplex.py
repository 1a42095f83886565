"""Exact two-phase simplex over rationals.

Used by the polyhedra domain for satisfiability, entailment and bound
queries. Free variables are split into differences of nonnegative ones;
Bland's rule guarantees termination with exact arithmetic.
"""
from __future__ import annotations

from fractions import Fraction

F = Fraction

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

Row = tuple[dict[str, Fraction], str, Fraction]  # (coeffs, "<=" | "==", const)


class _Tableau:
    """Standard-form tableau: u/w variable pairs, slacks, artificials."""

    def __init__(self, rows: list[Row], variables: list[str]):
        self.variables = variables
        self.var_idx = {v: i for i, v in enumerate(variables)}
        nv = len(variables)
        nslack = sum(1 for _, op, _ in rows if op == "<=")
        # Artificial columns are needed only for rows whose slack cannot
        # seed the basis: equalities, and <= rows with negative constant.
        nart = sum(1 for coeffs, op, const in rows if op == "==" or const < 0)
        self.nv = nv
        self.first_artificial = 2 * nv + nslack
        self.ncols = self.first_artificial + nart
        self.A: list[list[Fraction]] = []
        self.b: list[Fraction] = []
        self.basis: list[int] = []
        slack_at = 2 * nv
        art_at = self.first_artificial
        for coeffs, op, const in rows:
            vec = [F(0)] * self.ncols
            for v, c in coeffs.items():
                j = 2 * self.var_idx[v]
                vec[j] += c
                vec[j + 1] -= c
            slack_col = None
            if op == "<=":
                vec[slack_at] = F(1)
                slack_col = slack_at
                slack_at += 1
            if const < 0:
                vec = [-x for x in vec]
                const = -const
                slack_col = None  # slack coefficient is now -1
            if op == "==" or slack_col is None:
                vec[art_at] = F(1)
                self.basis.append(art_at)
                art_at += 1
            else:
                self.basis.append(slack_col)
            self.A.append(vec)
            self.b.append(const)

    def phase1(self) -> bool:
        """Returns True when the system is feasible; cleans artificials out."""
        if self.ncols == self.first_artificial:
            return True  # slack basis is already feasible
        cost = [F(0)] * self.ncols
        for j in range(self.first_artificial, self.ncols):
            cost[j] = F(-1)
        status, value = self._solve(cost)
        assert status == OPTIMAL  # phase 1 is always bounded
        if value != 0:
            return False
        # Drive leftover zero-valued artificials out of the basis so they
        # can never rise again; all-zero rows are redundant constraints.
        keep = []
        for i in range(len(self.A)):
            if self.basis[i] >= self.first_artificial:
                col = next(
                    (j for j in range(self.first_artificial) if self.A[i][j] != 0),
                    None,
                )
                if col is None:
                    continue
                self._pivot(i, col)
                self.basis[i] = col
            keep.append(i)
        if len(keep) != len(self.A):
            self.A = [self.A[i] for i in keep]
            self.b = [self.b[i] for i in keep]
            self.basis = [self.basis[i] for i in keep]
        return True

    def maximize(self, objective: dict[str, Fraction]):
        cost = [F(0)] * self.ncols
        for v, c in objective.items():
            j = 2 * self.var_idx[v]
            cost[j] += c
            cost[j + 1] -= c
        return self._solve(cost, blocked_from=self.first_artificial)

    def solution(self) -> dict[str, Fraction]:
        vals: dict[int, Fraction] = {self.basis[i]: self.b[i] for i in range(len(self.A))}
        return {
            v: vals.get(2 * i, F(0)) - vals.get(2 * i + 1, F(0))
            for v, i in self.var_idx.items()
        }

    def _solve(self, cost: list[Fraction], blocked_from: int | None = None):
        """Primal simplex with Bland's rule."""
        A, b, basis = self.A, self.b, self.basis
        limit = blocked_from if blocked_from is not None else self.ncols
        while True:
            m = len(A)
            y = [cost[basis[i]] for i in range(m)]
            in_basis = set(basis)
            entering = -1
            for j in range(limit):
                if j in in_basis:
                    continue
                rc = cost[j] - sum(y[i] * A[i][j] for i in range(m) if A[i][j])
                if rc > 0:
                    entering = j
                    break
            if entering < 0:
                return OPTIMAL, sum(cost[basis[i]] * b[i] for i in range(m))
            leaving = -1
            best = None
            for i in range(m):
                if A[i][entering] > 0:
                    ratio = b[i] / A[i][entering]
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leaving]
                    ):
                        best = ratio
                        leaving = i
            if leaving < 0:
                return UNBOUNDED, None
            self._pivot(leaving, entering)
            basis[leaving] = entering

    def _pivot(self, row: int, col: int) -> None:
        A, b = self.A, self.b
        pivot = A[row][col]
        if pivot != 1:
            A[row] = [x / pivot for x in A[row]]
            b[row] /= pivot
        for i in range(len(A)):
            if i != row and A[i][col] != 0:
                factor = A[i][col]
                A[i] = [x - factor * y for x, y in zip(A[i], A[row])]
                b[i] -= factor * b[row]


def lp_max(
    rows: list[Row], objective: dict[str, Fraction], variables: list[str]
) -> tuple[str, Fraction | None]:
    """Maximize objective·x subject to rows; x ranges over all rationals."""
    t = _Tableau(rows, variables)
    if not t.phase1():
        return INFEASIBLE, None
    return t.maximize(objective)


def lp_min(rows: list[Row], objective: dict[str, Fraction], variables: list[str]):
    status, value = lp_max(rows, {v: -c for v, c in objective.items()}, variables)
    return status, -value if value is not None else None


def feasible_point(rows: list[Row], variables: list[str]) -> dict[str, Fraction] | None:
    t = _Tableau(rows, variables)
    if not t.phase1():
        return None
    return t.solution()


def feasible(rows: list[Row], variables: list[str]) -> bool:
    return feasible_point(rows, variables) is not None
