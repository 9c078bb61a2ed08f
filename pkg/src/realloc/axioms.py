"""Axiom checkers.

Every checker returns a :class:`CheckResult`.  Exhaustive checkers
(efficiency, endowments lower bound, satiation, envy-free net trades,
population monotonicity) decide the axiom for the given economy; sampled
ones (own-peak-only, peak-only, strategy-proofness, non-bossiness,
endowments monotonicity) only report what their battery found.

Each violation kind has one detector, registered with
:mod:`realloc.witness`; checkers enumerate candidate parameters and call the
detector, so replaying a witness runs exactly the code that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InvalidPerturbation
from .model import Economy, Preference, as_rational, format_rational
from .rational import ZERO
from .rules import RuleId
from .witness import Witness, detector

__all__ = [
    "CheckResult",
    "WEIGHT_FLIPS",
    "check_efficiency",
    "check_elb",
    "check_lemma2_satiation",
    "check_envy_free_net_trades",
    "check_own_peak_only",
    "check_peak_only",
    "check_strategy_proofness",
    "check_non_bossiness",
    "check_os_endow_mono",
    "check_os_pop_mono",
    "weight_perturbations",
    "misreport_battery",
    "endowment_battery",
    "AXIOMS",
    "run_axiom",
]

WEIGHT_FLIPS = ((1, 1), (2, 1), (1, 2), (14, 1), (1, 14))

PASS, VIOLATION, INAPPLICABLE = "pass", "violation", "inapplicable"


@dataclass(frozen=True)
class CheckResult:
    axiom: str
    status: str
    witness: Optional[Witness] = None
    cases: int = 0
    skipped: int = 0
    sampled: bool = False

    @property
    def violated(self) -> bool:
        return self.status == VIOLATION

    def __str__(self):
        scope = "sampled" if self.sampled else "exhaustive"
        text = f"{self.axiom}: {self.status} ({self.cases} cases, {scope}"
        if self.skipped:
            text += f", {self.skipped} inapplicable"
        text += ")"
        if self.witness is not None:
            text += f"\n  witness: {self.witness}"
        return text


def _scan(axiom, kind, rule, e, candidates, sampled=False) -> CheckResult:
    """Run the detector over ``candidates``; stop at the first violation."""
    cases = skipped = 0
    for params in candidates:
        try:
            w = _detect(kind, rule, e, params)
        except _Inapplicable:
            skipped += 1
            continue
        cases += 1
        if w is not None:
            return CheckResult(axiom, VIOLATION, w, cases, skipped, sampled)
    status = INAPPLICABLE if skipped and not cases else PASS
    return CheckResult(axiom, status, None, cases, skipped, sampled)


class _Inapplicable(Exception):
    pass


def _detect(kind, rule, e, params):
    return _KIND_DETECTORS[kind](rule, e, params)


_KIND_DETECTORS = {}


def _register(kind):
    def wrap(fn):
        _KIND_DETECTORS[kind] = fn

        def public(rule, e, params):
            try:
                return fn(rule, e, params)
            except _Inapplicable:
                return None

        detector(kind)(public)
        return fn

    return wrap


def _fmt(x) -> str:
    return format_rational(x)


# -- exhaustive per-economy axioms -------------------------------------------


@_register("efficiency")
def _efficiency(rule, e, params):
    i = params["agent"]
    x = rule(e)
    p = e.peak(i)
    if e.excess() >= 0 and x[i] > p:
        text = f"z={_fmt(e.excess())} >= 0 but agent {i} gets {_fmt(x[i])} > peak {_fmt(p)}"
    elif e.excess() <= 0 and x[i] < p:
        text = f"z={_fmt(e.excess())} <= 0 but agent {i} gets {_fmt(x[i])} < peak {_fmt(p)}"
    else:
        return None
    return Witness("efficiency", rule, e, {"agent": i}, (i,), x, None, text)


def check_efficiency(rule: RuleId, e: Economy) -> CheckResult:
    return _scan("efficiency", "efficiency", rule, e, ({"agent": i} for i in e.agents))


@_register("elb")
def _elb(rule, e, params):
    i = params["agent"]
    x = rule(e)
    w = e.endowments[i]
    if not e.preferences[i].strictly_prefers(w, x[i]):
        return None
    text = f"agent {i} prefers endowment {_fmt(w)} to {_fmt(x[i])}"
    return Witness("elb", rule, e, {"agent": i}, (i,), x, None, text)


def check_elb(rule: RuleId, e: Economy) -> CheckResult:
    return _scan("elb", "elb", rule, e, ({"agent": i} for i in e.agents))


@_register("lemma2")
def _lemma2(rule, e, params):
    i = params["agent"]
    p, w = e.peak(i), e.endowments[i]
    z = e.excess()
    if not ((z >= 0 and p <= w) or (z <= 0 and p >= w)):
        raise _Inapplicable
    x = rule(e)
    if x[i] == p:
        return None
    side = "supplier under excess demand" if z >= 0 and p <= w else "demander under excess supply"
    text = f"agent {i} is a {side} but gets {_fmt(x[i])} != peak {_fmt(p)}"
    return Witness("lemma2", rule, e, {"agent": i}, (i,), x, None, text)


def check_lemma2_satiation(rule: RuleId, e: Economy) -> CheckResult:
    return _scan("lemma2", "lemma2", rule, e, ({"agent": i} for i in e.agents))


@_register("envy-free")
def _envy_free(rule, e, params):
    i, j = params["pair"]
    x = rule(e)
    # i's endowment shifted by j's net trade
    y = e.endowments[i] + x.net(j)
    if y < 0:
        raise _Inapplicable
    if not e.preferences[i].strictly_prefers(y, x[i]):
        return None
    text = (
        f"agent {i} prefers w_{i} + net_{j} = {_fmt(e.endowments[i])} + {_fmt(x.net(j))} "
        f"= {_fmt(y)} to {_fmt(x[i])}"
    )
    return Witness("envy-free", rule, e, {"pair": (i, j)}, (i, j), x, None, text)


def check_envy_free_net_trades(e: Economy, rule: Optional[RuleId] = None) -> CheckResult:
    """No agent prefers its own endowment plus another agent's net trade."""
    rule = rule or RuleId("uniform")
    pairs = ({"pair": (i, j)} for i in e.agents for j in e.agents if i != j)
    return _scan("envy-free", "envy-free", rule, e, pairs)


# -- preference perturbations ------------------------------------------------


def _perturbed(e: Economy, prefs: Mapping[int, Preference], same_peaks: bool) -> Economy:
    for i, pref in prefs.items():
        if i not in e.preferences:
            raise InvalidPerturbation(f"agent {i} is not in the economy")
        if same_peaks and pref.peak != e.peak(i):
            raise InvalidPerturbation(f"perturbation moves agent {i}'s peak")
    return e.with_preferences(prefs)


def _single(params) -> tuple:
    prefs = params["prefs"]
    if len(prefs) != 1:
        raise InvalidPerturbation("a unilateral perturbation changes exactly one agent")
    ((i, pref),) = prefs.items()
    return i, pref


def _describe_pref(pref: Preference) -> str:
    return f"peak={_fmt(pref.peak)} left={_fmt(pref.left)} right={_fmt(pref.right)}"


@_register("own-peak-only")
def _own_peak_only(rule, e, params):
    i, pref = _single(params)
    e2 = _perturbed(e, {i: pref}, same_peaks=True)
    x, y = rule(e), rule(e2)
    if x[i] == y[i]:
        return None
    text = f"agent {i} reports {_describe_pref(pref)}: own amount {_fmt(x[i])} -> {_fmt(y[i])}"
    return Witness("own-peak-only", rule, e, {"prefs": {i: pref}}, (i,), x, y, text, e2)


@_register("peak-only")
def _peak_only(rule, e, params):
    prefs = dict(params["prefs"])
    e2 = _perturbed(e, prefs, same_peaks=True)
    x, y = rule(e), rule(e2)
    changed = tuple(k for k in e.agents if x[k] != y[k])
    if not changed:
        return None
    moves = ", ".join(f"{k}: {_fmt(x[k])} -> {_fmt(y[k])}" for k in changed)
    text = f"peak-preserving change of {sorted(prefs)} moves {moves}"
    return Witness("peak-only", rule, e, {"prefs": prefs}, tuple(sorted(prefs)) + changed, x, y, text, e2)


@_register("strategy-proofness")
def _strategy_proofness(rule, e, params):
    i, pref = _single(params)
    e2 = _perturbed(e, {i: pref}, same_peaks=False)
    x, y = rule(e), rule(e2)
    if not e.preferences[i].strictly_prefers(y[i], x[i]):
        return None
    text = f"agent {i} reports {_describe_pref(pref)} and gets {_fmt(y[i])}, truly preferred to {_fmt(x[i])}"
    return Witness("strategy-proofness", rule, e, {"prefs": {i: pref}}, (i,), x, y, text, e2)


@_register("non-bossiness")
def _non_bossiness(rule, e, params):
    i, pref = _single(params)
    e2 = _perturbed(e, {i: pref}, same_peaks=False)
    x, y = rule(e), rule(e2)
    if x[i] != y[i]:
        return None
    changed = tuple(k for k in e.agents if x[k] != y[k])
    if not changed:
        return None
    moves = ", ".join(f"{k}: {_fmt(x[k])} -> {_fmt(y[k])}" for k in changed)
    text = f"agent {i} keeps {_fmt(x[i])} after reporting {_describe_pref(pref)}, yet {moves}"
    return Witness("non-bossiness", rule, e, {"prefs": {i: pref}}, (i,) + changed, x, y, text, e2)


def weight_perturbations(e: Economy, flips: Sequence = WEIGHT_FLIPS) -> list:
    """Every single-agent weight change drawn from ``flips``."""
    out = []
    for i in e.agents:
        pref = e.preferences[i]
        for left, right in flips:
            if (pref.left, pref.right) != (left, right):
                out.append({i: pref.with_weights(left, right)})
    return out


def misreport_battery(e: Economy, i: int, size: int = 64, flips: Sequence = WEIGHT_FLIPS) -> list:
    """Up to ``size`` alternative preferences for agent ``i``.

    Peaks come first (with the true weights): 0, the total endowment, every
    peak and endowment in the economy, midpoints between consecutive
    candidates, and ``i``'s endowment shifted by each other agent's gap.
    Weight flips at the true peak follow, then flips at the other peaks.
    """
    pref = e.preferences[i]
    total = e.total()
    base = {ZERO, total}
    base.update(e.peak(j) for j in e.agents)
    base.update(e.endowments[j] for j in e.agents)
    base.update(e.endowments[i] + e.peak(j) - e.endowments[j] for j in e.agents)
    base = sorted(v for v in base if v >= 0)
    peaks = set(base)
    peaks.update((a + b) / 2 for a, b in zip(base, base[1:]))
    peaks.discard(pref.peak)
    peaks = sorted(peaks)
    out = [pref.with_peak(p) for p in peaks]
    weights = [(left, right) for left, right in flips if (pref.left, pref.right) != (left, right)]
    out += [pref.with_weights(left, right) for left, right in weights]
    out += [Preference(p, left, right) for p in peaks for left, right in weights]
    return [{i: r} for r in out[:size]]


def _unilateral(e, battery, per_agent):
    if battery is not None:
        return list(battery)
    out = []
    for i in e.agents:
        out += misreport_battery(e, i, per_agent)
    return out


def check_own_peak_only(rule: RuleId, e: Economy, perturbations: Optional[Iterable] = None) -> CheckResult:
    battery = weight_perturbations(e) if perturbations is None else list(perturbations)
    return _scan("own-peak-only", "own-peak-only", rule, e, ({"prefs": p} for p in battery), sampled=True)


def check_peak_only(rule: RuleId, e: Economy, perturbations: Optional[Iterable] = None) -> CheckResult:
    battery = weight_perturbations(e) if perturbations is None else list(perturbations)
    return _scan("peak-only", "peak-only", rule, e, ({"prefs": p} for p in battery), sampled=True)


def check_strategy_proofness(
    rule: RuleId, e: Economy, misreports: Optional[Iterable] = None, per_agent: int = 64
) -> CheckResult:
    battery = _unilateral(e, misreports, per_agent)
    return _scan("strategy-proofness", "strategy-proofness", rule, e, ({"prefs": p} for p in battery), sampled=True)


def check_non_bossiness(
    rule: RuleId, e: Economy, perturbations: Optional[Iterable] = None, per_agent: int = 64
) -> CheckResult:
    battery = _unilateral(e, perturbations, per_agent)
    return _scan("non-bossiness", "non-bossiness", rule, e, ({"prefs": p} for p in battery), sampled=True)


# -- one-sided monotonicity ------------------------------------------------


@_register("os-endow-mono")
def _os_endow_mono(rule, e, params):
    new = {i: as_rational(v) for i, v in params["endowments"].items()}
    if set(new) != set(e.agents):
        raise InvalidPerturbation("new endowments must cover every agent")
    if any(new[i] < e.endowments[i] for i in e.agents):
        raise InvalidPerturbation("endowments may only increase")
    e2 = e.with_endowments(new)
    z, z2 = e.excess(), e2.excess()
    if z2 < 0 < z:
        raise _Inapplicable
    x, y = rule(e), rule(e2)
    for k in e.agents:
        pref = e.preferences[k]
        if z2 >= 0 and pref.strictly_prefers(x[k], y[k]):
            text = (
                f"z(e')={_fmt(z2)} >= 0 but agent {k} falls from {_fmt(x[k])} to {_fmt(y[k])} "
                "when endowments rise"
            )
            return Witness("os-endow-mono", rule, e, {"endowments": new}, (k,), x, y, text, e2)
        if z <= 0 and pref.strictly_prefers(y[k], x[k]):
            text = (
                f"z(e)={_fmt(z)} <= 0 but agent {k} gains from {_fmt(x[k])} to {_fmt(y[k])} "
                "when endowments rise"
            )
            return Witness("os-endow-mono", rule, e, {"endowments": new}, (k,), x, y, text, e2)
    return None


def endowment_battery(e: Economy, per_agent: int = 8) -> list:
    """Raised endowment vectors: one agent at a time by a few step sizes, the
    step that balances the economy, and everyone at once by 1."""
    steps = [as_rational(s) for s in ("1/4", "1/2", 1, 2, 4, 8)]
    z = e.excess()
    if z > 0:
        steps.append(z)
        steps.append(z / 2)
    steps = sorted(set(steps))[:per_agent]
    out = []
    for i in e.agents:
        for s in steps:
            new = dict(e.endowments)
            new[i] += s
            out.append(new)
    out.append({i: w + 1 for i, w in e.endowments.items()})
    return out


def check_os_endow_mono(rule: RuleId, e: Economy, new_endowments=None) -> CheckResult:
    """``new_endowments`` is one raised endowment map, a list of them, or
    ``None`` for :func:`endowment_battery`."""
    if new_endowments is None:
        battery = endowment_battery(e)
    elif isinstance(new_endowments, Mapping):
        battery = [new_endowments]
    else:
        battery = list(new_endowments)
    return _scan("os-endow-mono", "os-endow-mono", rule, e, ({"endowments": b} for b in battery), sampled=True)


@_register("os-pop-mono")
def _os_pop_mono(rule, e, params):
    subset = frozenset(params["subset"])
    if not subset or not subset < frozenset(e.agents):
        raise InvalidPerturbation("subpopulation must be a nonempty proper subset")
    e2 = e.restrict(subset)
    if e.excess() * e2.excess() < 0:
        raise _Inapplicable
    x, y = rule(e), rule(e2)
    gainer = loser = None
    for k in sorted(subset):
        pref = e.preferences[k]
        if gainer is None and pref.strictly_prefers(y[k], x[k]):
            gainer = k
        if loser is None and pref.strictly_prefers(x[k], y[k]):
            loser = k
    if gainer is None or loser is None:
        return None
    text = (
        f"after leaving {sorted(set(e.agents) - subset)}: agent {gainer} improves "
        f"{_fmt(x[gainer])} -> {_fmt(y[gainer])} while agent {loser} worsens {_fmt(x[loser])} -> {_fmt(y[loser])}"
    )
    return Witness("os-pop-mono", rule, e, {"subset": subset}, (gainer, loser), x, y, text, e2)


def proper_subsets(agents: Sequence[int]):
    for size in range(len(agents) - 1, 0, -1):
        for combo in combinations(agents, size):
            yield frozenset(combo)


def check_os_pop_mono(rule: RuleId, e: Economy, subsets: Optional[Iterable] = None) -> CheckResult:
    battery = proper_subsets(e.agents) if subsets is None else subsets
    return _scan("os-pop-mono", "os-pop-mono", rule, e, ({"subset": s} for s in battery))


# -- name registry used by the harness and the CLI ---------------------------

AXIOMS = {
    "efficiency": check_efficiency,
    "elb": check_elb,
    "lemma2": check_lemma2_satiation,
    "envy-free": lambda rule, e: check_envy_free_net_trades(e, rule),
    "own-peak-only": check_own_peak_only,
    "peak-only": check_peak_only,
    "strategy-proofness": check_strategy_proofness,
    "non-bossiness": check_non_bossiness,
    "os-endow-mono": check_os_endow_mono,
    "os-pop-mono": check_os_pop_mono,
}


def run_axiom(name: str, rule: RuleId, e: Economy) -> CheckResult:
    try:
        check = AXIOMS[name]
    except KeyError:
        raise ValueError(f"unknown axiom {name!r}; choose from {', '.join(AXIOMS)}") from None
    return check(rule, e)
