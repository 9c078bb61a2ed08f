"""Exact roots of nondecreasing piecewise-linear sums.

Each term is ``clip(slope * t + offset, lower, upper)`` with ``slope > 0`` and
optional bounds.  The sum is continuous and nondecreasing in ``t``, so a root
is found by sorting the kinks and solving the single linear piece that
brackets the target.  No tolerances are involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .rational import ZERO, Rational



@dataclass(frozen=True)
class Term:
    slope: Rational
    offset: Rational = ZERO
    lower: Optional[Rational] = None
    upper: Optional[Rational] = None

    def __post_init__(self):
        if self.slope <= 0:
            raise ValueError("term slope must be positive")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError("term lower bound exceeds upper bound")

    def __call__(self, t: Rational) -> Rational:
        v = self.slope * t + self.offset
        if self.lower is not None and v < self.lower:
            return self.lower
        if self.upper is not None and v > self.upper:
            return self.upper
        return v

    def kinks(self):
        if self.lower is not None:
            yield (self.lower - self.offset) / self.slope
        if self.upper is not None:
            yield (self.upper - self.offset) / self.slope


class NoRoot(ArithmeticError):
    pass


def total(terms: Sequence[Term], t: Rational) -> Rational:
    return sum((term(t) for term in terms), ZERO)


def solve(terms: Sequence[Term], target: Rational) -> Rational:
    """Smallest ``t`` with ``sum(term(t)) == target``.

    When the sum is flat at ``target`` to the left of every kink (so no
    smallest root exists) the leftmost kink is returned.
    """
    if not terms:
        if target == 0:
            return ZERO
        raise NoRoot("empty sum cannot reach a nonzero target")
    # slope changes at each kink: +slope where a term leaves its lower bound,
    # -slope where it reaches its upper bound
    delta: dict = {}
    slope = ZERO
    for term in terms:
        if term.lower is None:
            slope += term.slope
        else:
            k = (term.lower - term.offset) / term.slope
            delta[k] = delta.get(k, ZERO) + term.slope
        if term.upper is not None:
            k = (term.upper - term.offset) / term.slope
            delta[k] = delta.get(k, ZERO) - term.slope
    if not delta:
        return (target - sum((term.offset for term in terms), ZERO)) / slope

    kinks = sorted(delta)
    value = total(terms, kinks[0])
    if target <= value:
        if slope == 0:
            if target == value:
                return kinks[0]
            raise NoRoot(f"target {target} below the sum's infimum {value}")
        return kinks[0] - (value - target) / slope

    for lo, hi in zip(kinks, kinks[1:]):
        slope += delta[lo]
        if slope:
            nxt = value + slope * (hi - lo)
            if nxt >= target:
                return lo + (target - value) / slope
            value = nxt
    slope += delta[kinks[-1]]
    if slope == 0:
        raise NoRoot(f"target {target} above the sum's supremum {value}")
    return kinks[-1] + (target - value) / slope
