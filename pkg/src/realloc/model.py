"""Domain types for one-commodity reallocation economies.

Every quantity is an exact rational (see :mod:`realloc.rational`); floats
are rejected at the boundary so that indifference comparisons are exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from .errors import InfeasibleAllocation, InvalidEconomy, InvalidSubset
from .rational import ONE, ZERO, Rational, as_rational, ceil, floor, format_rational

class Comparison(enum.Enum):
    BETTER = "strictly-better"
    INDIFFERENT = "indifferent"
    WORSE = "strictly-worse"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Preference:
    """Single-peaked preference with a piecewise-linear (weighted V) disutility.

    ``d(x) = left * (peak - x)`` below the peak and ``right * (x - peak)``
    above it. Smaller disutility is better.
    """

    peak: Rational
    left: Rational = ONE
    right: Rational = ONE

    def __post_init__(self):
        object.__setattr__(self, "peak", as_rational(self.peak))
        object.__setattr__(self, "left", as_rational(self.left))
        object.__setattr__(self, "right", as_rational(self.right))
        if self.peak < 0:
            raise InvalidEconomy(f"peak must be nonnegative, got {self.peak}")
        if self.left <= 0 or self.right <= 0:
            raise InvalidEconomy("preference weights must be strictly positive")

    def disutility(self, x: Rational) -> Rational:
        if x <= self.peak:
            return self.left * (self.peak - x)
        return self.right * (x - self.peak)

    def compare(self, x: Rational, y: Rational) -> Comparison:
        dx, dy = self.disutility(x), self.disutility(y)
        if dx < dy:
            return Comparison.BETTER
        if dx > dy:
            return Comparison.WORSE
        return Comparison.INDIFFERENT

    def strictly_prefers(self, x: Rational, y: Rational) -> bool:
        return self.disutility(x) < self.disutility(y)

    def weakly_prefers(self, x: Rational, y: Rational) -> bool:
        return self.disutility(x) <= self.disutility(y)

    def with_peak(self, peak) -> "Preference":
        return Preference(as_rational(peak), self.left, self.right)

    def with_weights(self, left, right) -> "Preference":
        return Preference(self.peak, as_rational(left), as_rational(right))

    def __repr__(self):
        return (
            f"Preference(peak={format_rational(self.peak)}, "
            f"left={format_rational(self.left)}, right={format_rational(self.right)})"
        )


def prefers(pref: Preference, x, y) -> Comparison:
    """Compare amounts ``x`` and ``y`` under ``pref``."""
    return pref.compare(as_rational(x), as_rational(y))


@dataclass(frozen=True)
class Interval:
    """A (possibly unbounded) interval of rationals; ``None`` bounds are infinite."""

    lower: Optional[Rational]
    upper: Optional[Rational]
    lower_open: bool = False
    upper_open: bool = False

    @classmethod
    def make(cls, lower, upper, lower_open=False, upper_open=False) -> "Interval":
        lower = None if lower is None else as_rational(lower)
        upper = None if upper is None else as_rational(upper)
        if lower is None:
            lower_open = True
        if upper is None:
            upper_open = True
        if lower is not None and upper is not None:
            if lower > upper or (lower == upper and (lower_open or upper_open)):
                return EMPTY
        return cls(lower, upper, lower_open, upper_open)

    @classmethod
    def closed(cls, lower, upper) -> "Interval":
        return cls.make(lower, upper, False, False)

    @classmethod
    def open(cls, lower, upper) -> "Interval":
        return cls.make(lower, upper, True, True)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls.make(x, x)

    @property
    def is_empty(self) -> bool:
        return self is EMPTY or self == EMPTY

    def __contains__(self, x) -> bool:
        if self.is_empty:
            return False
        if self.lower is not None:
            if x < self.lower or (self.lower_open and x == self.lower):
                return False
        if self.upper is not None:
            if x > self.upper or (self.upper_open and x == self.upper):
                return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return EMPTY
        lo, lo_open = _tighter(self.lower, self.lower_open, other.lower, other.lower_open, max)
        hi, hi_open = _tighter(self.upper, self.upper_open, other.upper, other.upper_open, min)
        return Interval.make(lo, hi, lo_open, hi_open)

    def reflect(self, t: Rational) -> "Interval":
        """Return ``{t - y : y in self}``."""
        if self.is_empty:
            return EMPTY
        lo = None if self.upper is None else t - self.upper
        hi = None if self.lower is None else t - self.lower
        return Interval.make(lo, hi, self.upper_open, self.lower_open)

    def pick(self) -> Rational:
        """A canonical member: the point itself, else the integer nearest the
        middle of the interval, else the midpoint."""
        if self.is_empty:
            raise ValueError("empty interval has no members")
        if self.lower is not None and self.lower == self.upper:
            return self.lower
        if self.lower is None and self.upper is None:
            return ZERO
        if self.lower is None:
            mid = self.upper - 1
        elif self.upper is None:
            mid = self.lower + 1
        else:
            mid = (self.lower + self.upper) / 2
        for candidate in (floor(mid + ONE / 2), floor(mid), ceil(mid)):
            if candidate in self:
                return candidate
        return mid

    def __str__(self):
        if self.is_empty:
            return "{}"
        lo = "-inf" if self.lower is None else format_rational(self.lower)
        hi = "+inf" if self.upper is None else format_rational(self.upper)
        return f"{'(' if self.lower_open else '['}{lo}, {hi}{')' if self.upper_open else ']'}"


def _tighter(a, a_open, b, b_open, pick):
    if a is None:
        return b, b_open
    if b is None:
        return a, a_open
    if a == b:
        return a, a_open or b_open
    return (a, a_open) if pick(a, b) == a else (b, b_open)


EMPTY = Interval(ZERO, ZERO, True, True)
NONNEGATIVE = Interval(ZERO, None, False, True)


def strict_improvement_interval(pref: Preference, x) -> Interval:
    """The amounts ``y >= 0`` that ``pref`` strictly prefers to ``x``."""
    x = as_rational(x)
    p = pref.peak
    if x == p:
        return EMPTY
    if x < p:
        return Interval.open(x, p + pref.left / pref.right * (p - x)).intersect(NONNEGATIVE)
    return Interval.open(p - pref.right / pref.left * (x - p), x).intersect(NONNEGATIVE)


def weak_improvement_interval(pref: Preference, x) -> Interval:
    """The amounts ``y >= 0`` that ``pref`` weakly prefers to ``x``."""
    x = as_rational(x)
    p = pref.peak
    if x <= p:
        return Interval.closed(x, p + pref.left / pref.right * (p - x)).intersect(NONNEGATIVE)
    return Interval.closed(p - pref.right / pref.left * (x - p), x).intersect(NONNEGATIVE)


@dataclass(frozen=True, eq=False)
class Economy:
    """Agents (positive integer ids) with preferences and endowments."""

    preferences: Mapping[int, Preference]
    endowments: Mapping[int, Rational]
    agents: tuple = field(init=False)

    def __post_init__(self):
        prefs = dict(self.preferences)
        endow = {i: as_rational(w) for i, w in self.endowments.items()}
        if set(prefs) != set(endow):
            raise InvalidEconomy("every agent needs exactly one preference and one endowment")
        if not prefs:
            raise InvalidEconomy("an economy needs at least one agent")
        for i in prefs:
            if not isinstance(i, int) or isinstance(i, bool) or i < 1:
                raise InvalidEconomy(f"agent ids must be positive integers, got {i!r}")
            if endow[i] < 0:
                raise InvalidEconomy(f"agent {i} has a negative endowment")
        ids = tuple(sorted(prefs))
        object.__setattr__(self, "agents", ids)
        object.__setattr__(self, "preferences", MappingProxyType({i: prefs[i] for i in ids}))
        object.__setattr__(self, "endowments", MappingProxyType({i: endow[i] for i in ids}))
        # immutable, so the aggregates are computed once
        object.__setattr__(self, "_total", sum(endow.values(), ZERO))
        object.__setattr__(self, "_excess", sum((prefs[i].peak - endow[i] for i in ids), ZERO))

    @classmethod
    def build(cls, peaks, endowments, ids=None, weights=None) -> "Economy":
        """Build from parallel sequences; ``weights`` maps id -> (left, right)."""
        peaks = list(peaks)
        endowments = list(endowments)
        if len(peaks) != len(endowments):
            raise InvalidEconomy("peaks and endowments differ in length")
        ids = list(ids) if ids is not None else list(range(1, len(peaks) + 1))
        if len(ids) != len(peaks) or len(set(ids)) != len(ids):
            raise InvalidEconomy("ids must be distinct and match the number of agents")
        weights = weights or {}
        prefs = {}
        for i, p in zip(ids, peaks):
            left, right = weights.get(i, (1, 1))
            prefs[i] = Preference(as_rational(p), as_rational(left), as_rational(right))
        return cls(prefs, dict(zip(ids, endowments)))

    def __eq__(self, other):
        if not isinstance(other, Economy):
            return NotImplemented
        return dict(self.preferences) == dict(other.preferences) and dict(
            self.endowments
        ) == dict(other.endowments)

    def __hash__(self):
        return hash(tuple((i, self.preferences[i], self.endowments[i]) for i in self.agents))

    def __len__(self):
        return len(self.agents)

    def __repr__(self):
        parts = []
        for i in self.agents:
            pref = self.preferences[i]
            s = f"{i}: p={format_rational(pref.peak)} w={format_rational(self.endowments[i])}"
            if pref.left != 1 or pref.right != 1:
                s += f" ({format_rational(pref.left)},{format_rational(pref.right)})"
            parts.append(s)
        return "Economy(" + "; ".join(parts) + ")"

    def peak(self, i) -> Rational:
        return self.preferences[i].peak

    def endowment(self, i) -> Rational:
        return self.endowments[i]

    def total(self) -> Rational:
        return self._total

    def excess(self) -> Rational:
        return self._excess

    def demanders(self) -> frozenset:
        return frozenset(i for i in self.agents if self.peak(i) > self.endowments[i])

    def suppliers(self) -> frozenset:
        return frozenset(i for i in self.agents if self.peak(i) <= self.endowments[i])

    def aggregate_supply(self) -> Rational:
        return sum(
            (self.endowments[i] - self.peak(i) for i in self.agents if self.peak(i) <= self.endowments[i]),
            ZERO,
        )

    def aggregate_demand(self) -> Rational:
        return sum(
            (self.peak(i) - self.endowments[i] for i in self.agents if self.peak(i) > self.endowments[i]),
            ZERO,
        )

    def restrict(self, subset: Iterable[int]) -> "Economy":
        subset = set(subset)
        if not subset or not subset <= set(self.agents):
            raise InvalidSubset(f"{sorted(subset)} is not a nonempty subset of {list(self.agents)}")
        return Economy(
            {i: self.preferences[i] for i in subset},
            {i: self.endowments[i] for i in subset},
        )

    def without(self, j: int) -> "Economy":
        return self.restrict(i for i in self.agents if i != j)

    def with_endowments(self, updates: Mapping[int, Rational]) -> "Economy":
        endow = dict(self.endowments)
        for i, w in updates.items():
            if i not in endow:
                raise InvalidSubset(f"agent {i} is not in the economy")
            endow[i] = as_rational(w)
        return Economy(self.preferences, endow)

    def with_preferences(self, updates: Mapping[int, Preference]) -> "Economy":
        prefs = dict(self.preferences)
        for i, r in updates.items():
            if i not in prefs:
                raise InvalidSubset(f"agent {i} is not in the economy")
            prefs[i] = r
        return Economy(prefs, self.endowments)

    def with_agent(self, i: int, pref: Preference, endowment) -> "Economy":
        if i in self.preferences:
            raise InvalidEconomy(f"agent {i} is already present")
        prefs = dict(self.preferences)
        endow = dict(self.endowments)
        prefs[i] = pref
        endow[i] = as_rational(endowment)
        return Economy(prefs, endow)


def excess(e: Economy) -> Rational:
    """``sum(peak_i - endowment_i)``; nonnegative means excess demand."""
    return e.excess()


def demanders(e: Economy) -> frozenset:
    return e.demanders()


def aggregate_supply(e: Economy) -> Rational:
    return e.aggregate_supply()


def restrict(e: Economy, subset: Iterable[int]) -> Economy:
    return e.restrict(subset)


@dataclass(frozen=True, eq=False)
class Allocation:
    """A feasible reallocation of an economy's total endowment."""

    economy: Economy
    amounts: Mapping[int, Rational]

    def __post_init__(self):
        amounts = {i: as_rational(x) for i, x in self.amounts.items()}
        e = self.economy
        if set(amounts) != set(e.agents):
            raise InfeasibleAllocation("allocation must assign an amount to every agent")
        for i, x in amounts.items():
            if x < 0:
                raise InfeasibleAllocation(f"agent {i} assigned a negative amount {x}")
        if sum(amounts.values(), ZERO) != e.total():
            raise InfeasibleAllocation(
                f"amounts sum to {sum(amounts.values(), ZERO)} but endowments sum to {e.total()}"
            )
        object.__setattr__(self, "amounts", MappingProxyType({i: amounts[i] for i in e.agents}))

    def __getitem__(self, i) -> Rational:
        return self.amounts[i]

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return self.economy == other.economy and dict(self.amounts) == dict(other.amounts)

    def __hash__(self):
        return hash(tuple(self.amounts.items()))

    def __repr__(self):
        inner = ", ".join(f"{i}: {format_rational(x)}" for i, x in self.amounts.items())
        return f"Allocation({inner})"

    def net(self, i) -> Rational:
        return self.amounts[i] - self.economy.endowments[i]

    def net_trades(self) -> dict:
        return {i: self.net(i) for i in self.economy.agents}

    def as_tuple(self) -> tuple:
        return tuple(self.amounts[i] for i in self.economy.agents)
