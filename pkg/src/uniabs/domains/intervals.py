"""Integer intervals over unbounded integers.

Bounds are Python ints; the only floats ever stored are -inf/+inf markers
(int/float comparisons are exact in Python, so mixing is safe as long as
arithmetic goes through the helpers below). Division truncates toward
zero, matching the concrete semantics of Universal.
"""
from __future__ import annotations

from dataclasses import dataclass

NEG_INF = float("-inf")
POS_INF = float("inf")

Bound = int | float


def is_finite(b: Bound) -> bool:
    return isinstance(b, int)


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def trunc_mod(a: int, b: int) -> int:
    return a - b * trunc_div(a, b)


def badd(a: Bound, b: Bound) -> Bound:
    if is_finite(a) and is_finite(b):
        return a + b
    return a if not is_finite(a) else b


def bneg(a: Bound) -> Bound:
    if is_finite(a):
        return -a
    return POS_INF if a == NEG_INF else NEG_INF


def floor_div_bound(a: Bound, b: int) -> Bound:
    """Floor division of a bound by a nonzero finite integer."""
    if not is_finite(a):
        return a if b > 0 else bneg(a)
    return a // b


def ceil_div_bound(a: Bound, b: int) -> Bound:
    if not is_finite(a):
        return a if b > 0 else bneg(a)
    return -((-a) // b)


def _bmul(a: Bound, b: Bound) -> Bound:
    # 0 * inf = 0: valid for endpoint-candidate computation.
    if a == 0 or b == 0:
        return 0
    if is_finite(a) and is_finite(b):
        return a * b
    positive = (a > 0) == (b > 0)
    return POS_INF if positive else NEG_INF


def _bdiv(a: Bound, b: Bound) -> Bound:
    # b is never 0 here; infinities only in a.
    if is_finite(a) and is_finite(b):
        return trunc_div(a, b)
    if not is_finite(a) and not is_finite(b):
        return 0  # |a/b| <= some finite value; 0 is in the candidate hull
    if not is_finite(b):
        return 0
    positive = (a > 0) == (b > 0)
    return POS_INF if positive else NEG_INF


@dataclass(frozen=True)
class Interval:
    lo: Bound = NEG_INF
    hi: Bound = POS_INF
    is_bottom: bool = False

    def __post_init__(self):
        if not self.is_bottom:
            assert self.lo <= self.hi, f"malformed interval [{self.lo}, {self.hi}]"

    # --- constructors ---

    @staticmethod
    def top() -> "Interval":
        return Interval()

    @staticmethod
    def bottom() -> "Interval":
        return Interval(0, 0, is_bottom=True)

    @staticmethod
    def const(v: int) -> "Interval":
        return Interval(v, v)

    @staticmethod
    def range(lo: Bound, hi: Bound) -> "Interval":
        if lo > hi:
            return Interval.bottom()
        return Interval(lo, hi)

    # --- queries ---

    def is_top(self) -> bool:
        return not self.is_bottom and self.lo == NEG_INF and self.hi == POS_INF

    def is_const(self) -> bool:
        return not self.is_bottom and self.lo == self.hi

    def contains(self, v: int) -> bool:
        return not self.is_bottom and self.lo <= v <= self.hi

    def size(self) -> Bound:
        """Number of integers in the interval (inf when unbounded)."""
        if self.is_bottom:
            return 0
        if is_finite(self.lo) and is_finite(self.hi):
            return self.hi - self.lo + 1
        return POS_INF

    def values(self):
        """Iterate concrete members; only valid on finite intervals."""
        assert is_finite(self.lo) and is_finite(self.hi) and not self.is_bottom
        return range(self.lo, self.hi + 1)

    # --- lattice ---

    def join(self, other: "Interval") -> "Interval":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def meet(self, other: "Interval") -> "Interval":
        if self.is_bottom or other.is_bottom:
            return Interval.bottom()
        return Interval.range(max(self.lo, other.lo), min(self.hi, other.hi))

    def leq(self, other: "Interval") -> bool:
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        return other.lo <= self.lo and self.hi <= other.hi

    def widen(self, other: "Interval", thresholds: tuple[int, ...] = ()) -> "Interval":
        """Unstable bounds jump to the nearest enabled threshold, else to infinity."""
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        lo: Bound = self.lo
        if other.lo < self.lo:
            candidates = [t for t in thresholds if t <= other.lo]
            lo = max(candidates) if candidates else NEG_INF
        hi: Bound = self.hi
        if other.hi > self.hi:
            candidates = [t for t in thresholds if t >= other.hi]
            hi = min(candidates) if candidates else POS_INF
        return Interval(lo, hi)

    # --- arithmetic ---

    def __add__(self, other: "Interval") -> "Interval":
        if self.is_bottom or other.is_bottom:
            return Interval.bottom()
        return Interval(badd(self.lo, other.lo), badd(self.hi, other.hi))

    def __neg__(self) -> "Interval":
        if self.is_bottom:
            return self
        return Interval(bneg(self.hi), bneg(self.lo))

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def __mul__(self, other: "Interval") -> "Interval":
        if self.is_bottom or other.is_bottom:
            return Interval.bottom()
        candidates = [_bmul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(candidates), max(candidates))

    def divided_by(self, other: "Interval") -> "Interval":
        """Truncated division; 0 is removed from the divisor first."""
        if self.is_bottom or other.is_bottom:
            return Interval.bottom()
        result = Interval.bottom()
        for part in (other.meet(Interval(NEG_INF, -1)), other.meet(Interval(1, POS_INF))):
            if part.is_bottom:
                continue
            candidates = [_bdiv(a, b) for a in (self.lo, self.hi) for b in (part.lo, part.hi)]
            result = result.join(Interval(min(candidates), max(candidates)))
        return result

    def modulo(self, other: "Interval") -> "Interval":
        """Truncated modulo (sign follows the dividend); divisor 0 removed."""
        if self.is_bottom or other.is_bottom:
            return Interval.bottom()
        nonzero = other.meet(Interval(NEG_INF, -1)).join(other.meet(Interval(1, POS_INF)))
        if nonzero.is_bottom:
            return Interval.bottom()
        if self.is_const() and nonzero.is_const():
            return Interval.const(trunc_mod(self.lo, nonzero.lo))  # type: ignore[arg-type]
        max_abs = max(abs(nonzero.lo), abs(nonzero.hi)) if (
            is_finite(nonzero.lo) and is_finite(nonzero.hi)
        ) else POS_INF
        bound = badd(max_abs, -1)
        lo: Bound = bneg(bound)
        hi: Bound = bound
        if self.lo >= 0:
            lo = 0
            hi = min(hi, self.hi)
        elif self.hi <= 0:
            hi = 0
            lo = max(lo, self.lo)
        return Interval(lo, hi)

    def __repr__(self) -> str:
        if self.is_bottom:
            return "⊥"
        lo = "-∞" if self.lo == NEG_INF else str(self.lo)
        hi = "+∞" if self.hi == POS_INF else str(self.hi)
        return f"[{lo}, {hi}]"
