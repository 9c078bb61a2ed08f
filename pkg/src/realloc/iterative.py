"""Step-by-step net-trade traces and the conditions an iterative reallocator obeys.

Two trace builders are provided:

* :func:`derive_trace` re-runs a catalog rule on a sequence of staged
  economies.  At step ``t`` every agent holds ``endowment + q^{t-1}``; agents
  whose holdings reached their peak (on the rationed side of the market) keep
  their preference, the others are *relaxed* so that the rule treats them as
  unsatiable for one step.  The relaxed agents released by one step become
  frozen at the next, so the process settles within ``|N| - 1`` steps.
* :func:`uniform_lambda_trace` runs the explicit frozen-set / rationing-level
  recursion of the uniform reallocation rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional, Union

from . import pwl
from .rational import Rational
from .errors import InapplicableVariant, UnsupportedRule
from .model import ONE, ZERO, Economy, Preference, format_rational
from .rules import RuleId, phi_star_branch

__all__ = [
    "TraceStep",
    "Trace",
    "ConditionReport",
    "derive_trace",
    "uniform_lambda_trace",
    "check_step_conditions",
    "check_cross_conditions",
]


@dataclass(frozen=True)
class TraceStep:
    t: int
    net_trades: Mapping[int, Rational]
    staged_endowments: Mapping[int, Rational]
    frozen: frozenset = frozenset()
    lam: Optional[Rational] = None

    def describe(self, agents, with_lambda=False) -> str:
        q = ", ".join(format_rational(self.net_trades[i]) for i in agents)
        line = f"{self.t}: q=({q})"
        if with_lambda:
            lam = "-" if self.lam is None else format_rational(self.lam)
            frozen = ",".join(str(i) for i in sorted(self.frozen))
            line += f" lambda={lam} frozen={{{frozen}}}"
        return line


@dataclass(frozen=True)
class Trace:
    economy: Economy
    steps: tuple
    rule: Optional[RuleId] = None
    method: str = "derived"

    @property
    def final(self) -> Mapping[int, Rational]:
        return self.steps[-1].net_trades

    def __len__(self):
        return len(self.steps)

    def extended(self, extra: int = 1) -> "Trace":
        """The same process run for ``extra`` more steps."""
        n = len(self.steps) + extra
        if self.method == "uniform-lambda":
            return uniform_lambda_trace(self.economy, steps=n)
        return derive_trace(self.rule, self.economy, steps=n)


@dataclass
class ConditionReport:
    violations: list = field(default_factory=list)
    checks: int = 0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, message: str):
        self.violations.append(message)

    def __str__(self):
        head = "pass" if self.ok else "violation"
        lines = [f"{head} ({self.checks} checks)"]
        lines += ["  " + v for v in self.violations]
        lines += ["  note: " + n for n in self.notes]
        return "\n".join(lines)


def _frozen(e: Economy, holdings: Mapping[int, Rational], z: Rational) -> frozenset:
    if z >= 0:
        return frozenset(i for i in e.agents if e.peak(i) <= holdings[i])
    return frozenset(i for i in e.agents if e.peak(i) >= holdings[i])


def _staged_economy(e: Economy, holdings, frozen, z) -> Economy:
    if z < 0:
        # excess supply: consumption is bounded below by 0, so no agent can be
        # relaxed without reordering claims; the staged economy keeps true tastes
        return Economy(e.preferences, holdings)
    margin = e.total()
    prefs = {}
    for i in e.agents:
        pref = e.preferences[i]
        if i in frozen:
            prefs[i] = pref
        else:
            # lift the peak well above any attainable amount but keep the
            # original claim ordering: peak - holding = (p - w) + margin
            lifted = holdings[i] + (pref.peak - e.endowments[i]) + margin
            prefs[i] = Preference(lifted, pref.left, pref.right)
    return Economy(prefs, holdings)


def derive_trace(rule: RuleId, e: Economy, steps: Optional[int] = None) -> Trace:
    """Trace ``q^0 ... q^{|N|-1}`` of the staged construction for ``rule``.

    ``steps`` overrides the number of recorded steps (default ``|N|``), which
    is how stationarity beyond ``|N| - 1`` is checked.
    """
    if not rule.meets_endowments_lower_bound:
        raise UnsupportedRule(f"{rule} violates the endowments lower bound; no iterative reallocator induces it")
    steps = len(e) if steps is None else steps
    if steps < 1:
        raise ValueError("a trace has at least one step")
    staged_rule = rule
    if rule.tag == "phi-star":
        # phi-star reads one agent's full preference; fix the branch it takes on
        # e so staged economies cannot switch it
        staged_rule = phi_star_branch(e)
    z = e.excess()
    zero = {i: ZERO for i in e.agents}
    out = [TraceStep(0, zero, dict(e.endowments))]
    q = zero
    for t in range(1, steps):
        holdings = {i: e.endowments[i] + q[i] for i in e.agents}
        frozen = _frozen(e, holdings, z)
        staged = _staged_economy(e, holdings, frozen, z)
        alloc = staged_rule.apply(staged, strict_domain=False)
        q = {i: alloc[i] - e.endowments[i] for i in e.agents}
        out.append(TraceStep(t, q, holdings, frozen))
    return Trace(e, tuple(out), rule, "derived")


def uniform_lambda_trace(e: Economy, steps: Optional[int] = None) -> Trace:
    """The uniform reallocation rule's frozen-set / rationing-level recursion.

    Frozen agents sit at their peaks; every other agent's net trade is the
    common level ``lambda^t`` (``-lambda^t`` under excess supply), which
    balances the market.  Under excess supply the level is floored so no
    holding goes negative; an agent that hits zero is frozen at the next step.
    """
    steps = len(e) if steps is None else steps
    z = e.excess()
    zero = {i: ZERO for i in e.agents}
    out = [TraceStep(0, zero, dict(e.endowments), frozen=frozenset(), lam=ZERO)]
    q = zero
    lam = ZERO
    for t in range(1, steps):
        holdings = {i: e.endowments[i] + q[i] for i in e.agents}
        frozen = _frozen(e, holdings, z)
        free = [i for i in e.agents if i not in frozen]
        settled = sum((e.peak(i) - e.endowments[i] for i in frozen), ZERO)
        if free:
            if z >= 0:
                lam = -settled / len(free)
            else:
                # sum_free max(-lam, -w_i) = -settled, solved in mu = -lam
                terms = [pwl.Term(ONE, ZERO, -e.endowments[i], None) for i in free]
                lam = -pwl.solve(terms, -settled)
        q = {}
        for i in e.agents:
            if i in frozen:
                q[i] = e.peak(i) - e.endowments[i]
            elif z >= 0:
                q[i] = lam
            else:
                q[i] = max(-lam, -e.endowments[i])
        out.append(TraceStep(t, q, holdings, frozen, lam))
    return Trace(e, tuple(out), RuleId("uniform"), "uniform-lambda")


def check_step_conditions(trace: Trace) -> ConditionReport:
    """Within-economy conditions: peak freezing and monotone unfrozen trades,
    plus membership of every step in the feasible net-trade set and
    stationarity one step past the end."""
    e = trace.economy
    z = e.excess()
    report = ConditionReport()
    if len(trace.steps) != len(e):
        report.fail(f"trace has {len(trace.steps)} steps, expected {len(e)}")
    if any(v != 0 for v in trace.steps[0].net_trades.values()):
        report.fail("q^0 is not zero")
    for step in trace.steps:
        q = step.net_trades
        report.checks += 1
        if sum(q.values(), ZERO) != 0:
            report.fail(f"q^{step.t} sums to {sum(q.values(), ZERO)}, not 0")
        for i in e.agents:
            if e.endowments[i] + q[i] < 0:
                report.fail(f"q^{step.t}: agent {i} holds a negative amount")
    for prev, step in zip(trace.steps, trace.steps[1:]):
        t = step.t
        for i in e.agents:
            report.checks += 1
            held = e.endowments[i] + prev.net_trades[i]
            p = e.peak(i)
            qi, qp = step.net_trades[i], prev.net_trades[i]
            if (z >= 0 and p <= held) or (z < 0 and p >= held):
                if qi != p - e.endowments[i]:
                    report.fail(
                        f"(i) t={t} agent {i}: peak reached at t-1 but q={format_rational(qi)} "
                        f"!= {format_rational(p - e.endowments[i])}"
                    )
            elif z >= 0 and qi < qp:
                report.fail(f"(ii) t={t} agent {i}: net trade fell {format_rational(qp)} -> {format_rational(qi)}")
            elif z < 0 and qi > qp:
                report.fail(f"(ii) t={t} agent {i}: net trade rose {format_rational(qp)} -> {format_rational(qi)}")
    if trace.rule is None:
        report.notes.append("stationarity not checked: trace carries no rule to extend")
    else:
        longer = trace.extended(1)
        report.checks += 1
        if dict(longer.final) != dict(trace.final):
            report.fail(f"not stationary: step {len(e)} differs from step {len(e) - 1}")
    return report


def check_cross_conditions(rule: RuleId, e: Economy, variant: Union[Economy, Iterable[int]]) -> ConditionReport:
    """Compare the final steps of ``e`` and a variant economy.

    ``variant`` is either an economy with the same agents and preferences and
    weakly larger endowments (endowment condition) or a set of agent ids
    (subpopulation condition).
    """
    report = ConditionReport()
    base = derive_trace(rule, e).final
    if isinstance(variant, Economy):
        if variant.agents != e.agents or dict(variant.preferences) != dict(e.preferences):
            raise InapplicableVariant("endowment variant must keep agents and preferences")
        if any(variant.endowments[i] < e.endowments[i] for i in e.agents):
            raise InapplicableVariant("endowment variant must weakly increase every endowment")
        if not (e.excess() <= 0 or variant.excess() >= 0):
            raise InapplicableVariant("excess demand at e turns into excess supply at the variant")
        other = derive_trace(rule, variant).final
        for i in e.agents:
            report.checks += 1
            lhs = variant.endowments[i] + other[i]
            rhs = e.endowments[i] + base[i]
            if lhs < rhs:
                report.fail(
                    f"(iii) agent {i}: {format_rational(lhs)} at the richer economy < {format_rational(rhs)}"
                )
        return report

    subset = frozenset(variant)
    sub = e.restrict(subset)
    z, zs = e.excess(), sub.excess()
    if not ((z >= 0 and zs >= 0) or (z <= 0 and zs <= 0)):
        raise InapplicableVariant("subeconomy lies on the other side of zero excess")
    other = derive_trace(rule, sub).final
    for i, j in combinations(sorted(subset), 2):
        report.checks += 1
        if (other[i] - base[i]) * (other[j] - base[j]) < 0:
            report.fail(
                f"(iv) agents {i},{j}: net trades move in opposite directions "
                f"({format_rational(base[i])}->{format_rational(other[i])}, "
                f"{format_rational(base[j])}->{format_rational(other[j])})"
            )
    return report
