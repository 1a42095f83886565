"""Bounded string powersets: a finite set of candidate strings or top."""
from __future__ import annotations

from dataclasses import dataclass

DEFAULT_BOUND = 5


@dataclass(frozen=True)
class StringPowerset:
    members: frozenset[str] | None  # None encodes top

    @staticmethod
    def top() -> "StringPowerset":
        return StringPowerset(None)

    @staticmethod
    def of(*strings: str) -> "StringPowerset":
        return StringPowerset(frozenset(strings))

    def is_top(self) -> bool:
        return self.members is None

    def is_finite(self) -> bool:
        return self.members is not None

    def contains(self, s: str) -> bool:
        return self.members is None or s in self.members

    def __repr__(self) -> str:
        if self.members is None:
            return "⊤"
        return "{" + ", ".join(f'"{m}"' for m in sorted(self.members)) + "}"


def powerset_join(a: StringPowerset, b: StringPowerset, k: int = DEFAULT_BOUND) -> StringPowerset:
    """Set union bounded by k; any overflow (or top operand) gives top."""
    if a.members is None or b.members is None:
        return StringPowerset.top()
    union = a.members | b.members
    if len(union) > k:
        return StringPowerset.top()
    return StringPowerset(union)


def powerset_concat(a: StringPowerset, b: StringPowerset, k: int) -> StringPowerset:
    """Exact elementwise concatenation while both sides stay finite."""
    if a.members is None or b.members is None:
        return StringPowerset.top()
    combos = {x + y for x in a.members for y in b.members}
    if len(combos) > k:
        return StringPowerset.top()
    return StringPowerset(frozenset(combos))


def powerset_leq(a: StringPowerset, b: StringPowerset) -> bool:
    if b.members is None:
        return True
    if a.members is None:
        return False
    return a.members <= b.members
