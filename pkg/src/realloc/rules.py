"""Reallocation rules: pure maps from an :class:`Economy` to an :class:`Allocation`.

At zero excess every rule takes its excess-demand branch; efficiency and
feasibility force the peak allocation there, so both branches agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby
from typing import Callable, Optional

from . import pwl
from .rational import Rational
from .errors import DomainError, UnknownRule
from .model import ONE, ZERO, Allocation, Economy

__all__ = [
    "AgentOrder",
    "RuleId",
    "RULE_TAGS",
    "parse_rule",
    "uniform_realloc",
    "uniform_lambda",
    "proportional",
    "proportional_lambda",
    "priority",
    "max_satiating",
    "sprumont_uniform",
    "sprumont_lambda",
    "endowments_rule",
    "phi_bar",
    "phi_star",
    "phi_star_branch",
]


@dataclass(frozen=True)
class AgentOrder:
    """Strict total order over agent ids.

    Ids listed in ``ranking`` come first in the listed order, every other id
    follows in increasing numeric order.  ``dual`` reverses the whole order.
    """

    ranking: tuple = ()
    dual: bool = False

    def key(self, i: int) -> tuple:
        try:
            k = (0, self.ranking.index(i))
        except ValueError:
            k = (1, i)
        return (-k[0], -k[1]) if self.dual else k

    def sort(self, ids) -> list:
        return sorted(ids, key=self.key)

    def reversed(self) -> "AgentOrder":
        return AgentOrder(self.ranking, not self.dual)

    def __str__(self):
        body = ",".join(str(i) for i in self.ranking)
        if self.dual:
            return "~" + body if body else "dual"
        return body or "natural"

    @classmethod
    def parse(cls, text: str) -> "AgentOrder":
        text = text.strip()
        dual = False
        if text in ("", "natural"):
            return cls()
        if text == "dual":
            return cls(dual=True)
        if text.startswith("~"):
            dual, text = True, text[1:]
        try:
            ranking = tuple(int(tok) for tok in text.split(",") if tok.strip())
        except ValueError:
            raise UnknownRule(f"bad agent order {text!r}; expected natural, dual, or ids like 3,1,2") from None
        if len(set(ranking)) != len(ranking):
            raise UnknownRule(f"agent order {text!r} repeats an id")
        return cls(ranking, dual)


NATURAL = AgentOrder()


# -- excess-demand / excess-supply helpers --------------------------------


def _demand_side(e: Economy) -> bool:
    return e.excess() >= 0


def _alloc(e: Economy, amounts: dict) -> Allocation:
    return Allocation(e, amounts)


# -- uniform reallocation rule ---------------------------------------------


def uniform_lambda(e: Economy) -> Rational:
    """The rationing level of the uniform reallocation rule (always >= 0)."""
    gaps = [e.peak(i) - e.endowments[i] for i in e.agents]
    if _demand_side(e):
        # sum_i min(gap_i, lam) == 0
        terms = [pwl.Term(ONE, ZERO, None, g) for g in gaps]
        return max(pwl.solve(terms, ZERO), ZERO)
    # sum_i max(gap_i, -lam) == 0, solved in mu = -lam
    terms = [pwl.Term(ONE, ZERO, g, None) for g in gaps]
    return max(-pwl.solve(terms, ZERO), ZERO)


def uniform_realloc(e: Economy) -> Allocation:
    lam = uniform_lambda(e)
    if _demand_side(e):
        return _alloc(e, {i: min(e.peak(i), e.endowments[i] + lam) for i in e.agents})
    return _alloc(e, {i: max(e.peak(i), e.endowments[i] - lam) for i in e.agents})


# -- proportional reallocation rule ----------------------------------------


def _check_positive_endowments(e: Economy):
    for i in e.agents:
        if e.endowments[i] <= 0:
            raise DomainError(f"proportional rule needs positive endowments; agent {i} has {e.endowments[i]}")


def proportional_lambda(e: Economy, *, allow_zero_endowments: bool = False) -> Rational:
    """Scaling factor: >= 1 under excess demand, in [0, 1] under excess supply.

    With ``allow_zero_endowments`` an agent holding nothing is treated as the
    constant ``min/max(peak, 0)``, the pointwise limit of the formula.
    """
    if not allow_zero_endowments:
        _check_positive_endowments(e)
    demand = _demand_side(e)
    target = e.total()
    terms = []
    for i in e.agents:
        w, p = e.endowments[i], e.peak(i)
        if w == 0:
            target -= ZERO if demand else p
        elif demand:
            terms.append(pwl.Term(w, ZERO, None, p))
        else:
            terms.append(pwl.Term(w, ZERO, p, None))
    if not terms:
        return ONE
    try:
        lam = pwl.solve(terms, target)
    except pwl.NoRoot:
        # only reachable with zero endowments: those agents cannot absorb trade
        raise DomainError("proportional rule is undefined here: agents without endowment cannot trade") from None
    return max(lam, ONE) if demand else min(max(lam, ZERO), ONE)


def proportional(e: Economy, *, allow_zero_endowments: bool = False) -> Allocation:
    lam = proportional_lambda(e, allow_zero_endowments=allow_zero_endowments)
    if _demand_side(e):
        return _alloc(e, {i: min(e.peak(i), lam * e.endowments[i]) for i in e.agents})
    return _alloc(e, {i: max(e.peak(i), lam * e.endowments[i]) for i in e.agents})


# -- priority rules --------------------------------------------------------


def priority(order: Optional[AgentOrder], e: Economy) -> Allocation:
    """Satiate the long side, then serve the short side one agent at a time."""
    order = order or NATURAL
    amounts = {}
    if _demand_side(e):
        remaining = e.aggregate_supply()
        rationed = []
        for i in e.agents:
            if e.peak(i) <= e.endowments[i]:
                amounts[i] = e.peak(i)
            else:
                rationed.append(i)
        for i in order.sort(rationed):
            amounts[i] = min(e.peak(i), e.endowments[i] + remaining)
            remaining -= amounts[i] - e.endowments[i]
    else:
        remaining = e.aggregate_demand()
        rationed = []
        for i in e.agents:
            if e.peak(i) > e.endowments[i]:
                amounts[i] = e.peak(i)
            else:
                rationed.append(i)
        for i in order.sort(rationed):
            amounts[i] = max(e.peak(i), e.endowments[i] - remaining)
            remaining -= e.endowments[i] - amounts[i]
    return _alloc(e, amounts)


def phi_bar(order: Optional[AgentOrder], e: Economy) -> Allocation:
    """Priority under ``order`` for odd populations, under its dual for even."""
    order = order or NATURAL
    return priority(order if len(e) % 2 else order.reversed(), e)


# -- maximally satiating rule ----------------------------------------------


def max_satiating(e: Economy) -> Allocation:
    """Serve the short side in groups of equal claim, smallest claims first."""
    amounts = {}
    demand = _demand_side(e)
    if demand:
        remaining = e.aggregate_supply()
        short = [i for i in e.agents if e.peak(i) > e.endowments[i]]
        for i in e.agents:
            if i not in short:
                amounts[i] = e.peak(i)
        claim = lambda i: e.peak(i) - e.endowments[i]  # noqa: E731
    else:
        remaining = e.aggregate_demand()
        short = [i for i in e.agents if e.peak(i) <= e.endowments[i]]
        for i in e.agents:
            if i not in short:
                amounts[i] = e.peak(i)
        claim = lambda i: e.endowments[i] - e.peak(i)  # noqa: E731

    for _, group in groupby(sorted(short, key=claim), key=claim):
        group = list(group)
        share = remaining / len(group)
        moved = ZERO
        for i in group:
            if demand:
                amounts[i] = min(e.peak(i), e.endowments[i] + share)
                moved += amounts[i] - e.endowments[i]
            else:
                amounts[i] = max(e.peak(i), e.endowments[i] - share)
                moved += e.endowments[i] - amounts[i]
        remaining -= moved
    return _alloc(e, amounts)


# -- endowment-blind uniform rule ------------------------------------------


def sprumont_lambda(e: Economy) -> Rational:
    if _demand_side(e):
        terms = [pwl.Term(ONE, ZERO, None, e.peak(i)) for i in e.agents]
    else:
        terms = [pwl.Term(ONE, ZERO, e.peak(i), None) for i in e.agents]
    return pwl.solve(terms, e.total())


def sprumont_uniform(e: Economy) -> Allocation:
    lam = sprumont_lambda(e)
    if _demand_side(e):
        return _alloc(e, {i: min(e.peak(i), lam) for i in e.agents})
    return _alloc(e, {i: max(e.peak(i), lam) for i in e.agents})


def endowments_rule(e: Economy) -> Allocation:
    return _alloc(e, dict(e.endowments))


# -- the non-peak-only rule ------------------------------------------------


def phi_star_branch(e: Economy) -> "RuleId":
    """Which rule ``phi_star`` delegates to on ``e``.

    Under excess demand the pivot is the lowest-id supplier: if it strictly
    prefers 0 to the whole endowment, demanders are served by priority in
    increasing order of their claims (ties by id); otherwise the uniform
    reallocation rule applies.  Excess supply mirrors this with the pivot being
    the lowest-id demander comparing the whole endowment against 0.
    """
    total = e.total()
    if _demand_side(e):
        long_side = sorted(e.suppliers())
        short = e.demanders()
        claim = lambda i: e.peak(i) - e.endowments[i]  # noqa: E731
    else:
        long_side = sorted(e.demanders())
        short = e.suppliers()
        claim = lambda i: e.endowments[i] - e.peak(i)  # noqa: E731
    if not long_side:
        return RuleId("endowments")
    pivot = e.preferences[long_side[0]]
    better, worse = (ZERO, total) if _demand_side(e) else (total, ZERO)
    if pivot.strictly_prefers(better, worse):
        ranking = tuple(sorted(short, key=lambda i: (claim(i), i)))
        return RuleId("priority", AgentOrder(ranking))
    return RuleId("uniform")


def phi_star(e: Economy) -> Allocation:
    return phi_star_branch(e)(e)


# -- rule identifiers ------------------------------------------------------

RULE_TAGS = (
    "uniform",
    "proportional",
    "priority",
    "max-satiating",
    "sprumont",
    "endowments",
    "phi-bar",
    "phi-star",
)

_ALIASES = {
    "uniform-realloc": "uniform",
    "sprumont-uniform": "sprumont",
    "max_satiating": "max-satiating",
    "phi_bar": "phi-bar",
    "phi_star": "phi-star",
}

_ORDERED = {"priority", "phi-bar"}


@dataclass(frozen=True)
class RuleId:
    """A catalog rule, plus its agent order when the rule takes one."""

    tag: str
    order: Optional[AgentOrder] = None

    def __post_init__(self):
        tag = _ALIASES.get(self.tag, self.tag)
        if tag not in RULE_TAGS:
            raise UnknownRule(f"unknown rule {self.tag!r}; choose from {', '.join(RULE_TAGS)}")
        object.__setattr__(self, "tag", tag)
        if tag in _ORDERED:
            if self.order is None:
                object.__setattr__(self, "order", NATURAL)
        elif self.order is not None:
            raise UnknownRule(f"rule {tag!r} takes no agent order")

    def __str__(self):
        if self.tag in _ORDERED and self.order != NATURAL:
            return f"{self.tag}:{self.order}"
        return self.tag

    def __call__(self, e: Economy, *, strict_domain: bool = True) -> Allocation:
        return self.apply(e, strict_domain=strict_domain)

    def apply(self, e: Economy, *, strict_domain: bool = True) -> Allocation:
        if self.tag == "proportional":
            return proportional(e, allow_zero_endowments=not strict_domain)
        if self.tag in _ORDERED:
            return _ORDERED_IMPL[self.tag](self.order, e)
        return _PLAIN_IMPL[self.tag](e)

    @property
    def meets_endowments_lower_bound(self) -> bool:
        return self.tag != "sprumont"

    @property
    def efficient(self) -> bool:
        return self.tag != "endowments"


_PLAIN_IMPL: dict[str, Callable[[Economy], Allocation]] = {
    "uniform": uniform_realloc,
    "max-satiating": max_satiating,
    "sprumont": sprumont_uniform,
    "endowments": endowments_rule,
    "phi-star": phi_star,
}
_ORDERED_IMPL = {"priority": priority, "phi-bar": phi_bar}


def parse_rule(text: str) -> RuleId:
    """Parse ``uniform``, ``priority:3,1,2``, ``phi-bar:dual`` and the like."""
    tag, _, order = text.strip().partition(":")
    tag = _ALIASES.get(tag, tag)
    if tag not in RULE_TAGS:
        raise UnknownRule(f"unknown rule {text!r}; choose from {', '.join(RULE_TAGS)}")
    if tag in _ORDERED:
        return RuleId(tag, AgentOrder.parse(order))
    if order:
        raise UnknownRule(f"rule {tag!r} takes no agent order")
    return RuleId(tag)


ALL_RULES = tuple(RuleId(t) for t in RULE_TAGS)
