"""Large-deviations upper bounds on empirical-success regret.

Both bounds apply to balanced designs (n subjects in each of L arms) with
outcomes in an interval of length V, and shrink like n^(-1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ValidationError


@dataclass(frozen=True)
class BoundInput:
    """Outcome range V, number of arms L and subjects per arm n.

    V = 0 is accepted as the degenerate constant-outcome case, for which
    every bound is 0.
    """

    V: float
    L: int
    n: int

    def __post_init__(self):
        if not (isinstance(self.V, (int, float)) and math.isfinite(self.V) and self.V >= 0):
            raise ValidationError(f"V must be a finite number >= 0, got {self.V!r}")
        if isinstance(self.L, bool) or int(self.L) != self.L or self.L < 2:
            raise ValidationError(f"L must be an integer >= 2, got {self.L!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "V", float(self.V))


def bound_prop1(b: BoundInput) -> float:
    """(2e)^(-1/2) V (L - 1) / sqrt(n); grows linearly in the number of arms."""
    return b.V * (b.L - 1) / math.sqrt(2 * math.e * b.n)


def bound_prop2(b: BoundInput) -> float:
    """V sqrt(ln L) / sqrt(n)."""
    return b.V * math.sqrt(math.log(b.L) / b.n)


@dataclass(frozen=True)
class BoundResult:
    value: float
    which: str
    prop1: float
    prop2: float
    rationale: str

    def to_dict(self) -> dict:
        return {"value": self.value, "which": self.which, "prop1": self.prop1,
                "prop2": self.prop2, "rationale": self.rationale}


def bound_best(b: BoundInput) -> BoundResult:
    """The smaller of the two bounds, tagged with the one selected.

    On exact ties (only possible at V = 0) ``prop1`` is reported.
    """
    p1, p2 = bound_prop1(b), bound_prop2(b)
    which = "prop1" if p1 <= p2 else "prop2"
    if b.V == 0:
        why = "V = 0: both bounds vanish"
    elif which == "prop1":
        why = f"(L-1)/sqrt(2e) = {(b.L - 1) / math.sqrt(2 * math.e):.4f} <= sqrt(ln L) = " \
              f"{math.sqrt(math.log(b.L)):.4f} at L = {b.L}"
    else:
        why = f"sqrt(ln L) = {math.sqrt(math.log(b.L)):.4f} < (L-1)/sqrt(2e) = " \
              f"{(b.L - 1) / math.sqrt(2 * math.e):.4f} at L = {b.L}"
    return BoundResult(min(p1, p2), which, p1, p2, why)
