"""Arithmetic congruences: the set {a*k + b | k ∈ ℤ}, canonically stored.

a = 0 denotes the constant b, a = 1 denotes all integers (top). For a > 0
the remainder satisfies 0 <= b < a.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .intervals import trunc_div, trunc_mod


@dataclass(frozen=True)
class Congruence:
    modulus: int = 1
    remainder: int = 0
    is_bottom: bool = False

    def __post_init__(self):
        if not self.is_bottom:
            assert self.modulus >= 0
            if self.modulus > 0:
                assert 0 <= self.remainder < self.modulus

    @staticmethod
    def make(a: int, b: int) -> "Congruence":
        a = abs(a)
        return Congruence(a, b % a if a > 0 else b)

    @staticmethod
    def top() -> "Congruence":
        return Congruence(1, 0)

    @staticmethod
    def bottom() -> "Congruence":
        return Congruence(1, 0, is_bottom=True)

    @staticmethod
    def const(v: int) -> "Congruence":
        return Congruence(0, v)

    def is_top(self) -> bool:
        return not self.is_bottom and self.modulus == 1

    def is_const(self) -> bool:
        return not self.is_bottom and self.modulus == 0

    def contains(self, v: int) -> bool:
        if self.is_bottom:
            return False
        if self.modulus == 0:
            return v == self.remainder
        return v % self.modulus == self.remainder

    # --- lattice ---

    def join(self, other: "Congruence") -> "Congruence":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        a = math.gcd(self.modulus, other.modulus, abs(self.remainder - other.remainder))
        return Congruence.make(a, self.remainder)

    def meet(self, other: "Congruence") -> "Congruence":
        if self.is_bottom or other.is_bottom:
            return Congruence.bottom()
        a1, b1, a2, b2 = self.modulus, self.remainder, other.modulus, other.remainder
        if a1 == 0 and a2 == 0:
            return self if b1 == b2 else Congruence.bottom()
        if a1 == 0:
            return self if other.contains(b1) else Congruence.bottom()
        if a2 == 0:
            return other if self.contains(b2) else Congruence.bottom()
        g = math.gcd(a1, a2)
        if (b2 - b1) % g != 0:
            return Congruence.bottom()
        lcm = a1 // g * a2
        # CRT: find x ≡ b1 (a1), x ≡ b2 (a2).
        _, p, _ = _egcd(a1, a2)
        x = (b1 + (b2 - b1) // g * p % (a2 // g) * a1) % lcm
        return Congruence.make(lcm, x)

    def leq(self, other: "Congruence") -> bool:
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        if other.modulus == 0:
            return self.modulus == 0 and self.remainder == other.remainder
        return self.modulus % other.modulus == 0 and other.contains(self.remainder)

    def widen(self, other: "Congruence") -> "Congruence":
        # The congruence lattice has no infinite ascending chains of interest
        # here; join is a valid widening for gcd-shrinking sequences.
        return self.join(other)

    # --- arithmetic ---

    def __add__(self, other: "Congruence") -> "Congruence":
        if self.is_bottom or other.is_bottom:
            return Congruence.bottom()
        a = math.gcd(self.modulus, other.modulus)
        return Congruence.make(a, self.remainder + other.remainder)

    def __neg__(self) -> "Congruence":
        if self.is_bottom:
            return self
        if self.modulus == 0:
            return Congruence.const(-self.remainder)
        return Congruence.make(self.modulus, -self.remainder)

    def __sub__(self, other: "Congruence") -> "Congruence":
        return self + (-other)

    def __mul__(self, other: "Congruence") -> "Congruence":
        if self.is_bottom or other.is_bottom:
            return Congruence.bottom()
        a = math.gcd(
            self.modulus * other.modulus,
            self.modulus * other.remainder,
            other.modulus * self.remainder,
        )
        return Congruence.make(a, self.remainder * other.remainder)

    def divided_by(self, other: "Congruence") -> "Congruence":
        if self.is_bottom or other.is_bottom:
            return Congruence.bottom()
        if self.is_const() and other.is_const():
            if other.remainder == 0:
                return Congruence.bottom()
            return Congruence.const(trunc_div(self.remainder, other.remainder))
        return Congruence.top()

    def modulo(self, other: "Congruence") -> "Congruence":
        if self.is_bottom or other.is_bottom:
            return Congruence.bottom()
        if self.is_const() and other.is_const():
            if other.remainder == 0:
                return Congruence.bottom()
            return Congruence.const(trunc_mod(self.remainder, other.remainder))
        if other.is_const() and other.remainder != 0:
            c = abs(other.remainder)
            # x = a*k + b with c | a and c | b means x is a multiple of c,
            # so x % c == 0 regardless of x's sign under truncated modulo.
            if self.modulus % c == 0 and self.remainder % c == 0:
                return Congruence.const(0)
        return Congruence.top()

    def __repr__(self) -> str:
        if self.is_bottom:
            return "⊥"
        if self.modulus == 0:
            return f"{{{self.remainder}}}"
        return f"{self.remainder} [{self.modulus}]"


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with a*x + b*y = g."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y
