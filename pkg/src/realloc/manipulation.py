"""Variable-population manipulations: withdrawal, merging, splitting and
pre-delivery.

Withdrawal and merging are decided exactly: better-than sets of weighted-V
preferences are intervals, so a profitable split of a fixed amount ``T``
between two agents exists iff one interval meets the other reflected
through ``T``.  Splitting is searched over a finite battery of guest
preferences and endowment splits (sound but incomplete).  Pre-delivery is
exhaustive over ordered pairs.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .errors import DomainError, InvalidBattery, UnsupportedRule
from .model import (
    Economy,
    Interval,
    Preference,
    as_rational,
    format_rational,
    strict_improvement_interval,
    weak_improvement_interval,
)
from .rational import ZERO
from .rules import RuleId
from .witness import Witness, detector

__all__ = [
    "find_withdrawal",
    "find_merging",
    "find_splitting",
    "find_predelivery",
    "construct_predelivery_witness",
    "default_guest_peaks",
    "default_split_points",
    "fresh_id",
    "MANIPULATIONS",
]

_fmt = format_rational


def _pairs(e: Economy, pairs):
    if pairs is not None:
        return [tuple(p) for p in pairs]
    return [(i, j) for i in e.agents for j in e.agents if i != j]


def _split_amount(pi: Preference, xi, pj: Preference, xj, total, combos) -> Optional[tuple]:
    """A division ``(y_i, y_j)`` of ``total`` improving both agents as
    required by one of ``combos`` (pairs of "strict"/"weak")."""
    span = Interval.closed(ZERO, total)
    for mode_i, mode_j in combos:
        ii = (strict_improvement_interval if mode_i == "strict" else weak_improvement_interval)(pi, xi)
        ij = (strict_improvement_interval if mode_j == "strict" else weak_improvement_interval)(pj, xj)
        hit = ii.intersect(ij.reflect(total)).intersect(span)
        if not hit.is_empty:
            yi = hit.pick()
            return yi, total - yi, (mode_i, mode_j)
    return None


# -- withdrawal --------------------------------------------------------------

_WITHDRAWAL_COMBOS = {
    "strict": (("strict", "strict"),),
    "weak": (("strict", "weak"), ("weak", "strict")),
}


@detector("withdrawal")
def _withdrawal(rule, e, params):
    i, j = params["pair"]
    mode = params.get("mode", "strict")
    if mode not in _WITHDRAWAL_COMBOS:
        raise ValueError(f"withdrawal mode must be strict or weak, not {mode!r}")
    if len(e) < 2:
        return None
    x = rule(e)
    e2 = e.without(j)
    stay = rule(e2)
    total = stay[i] + e.endowments[j]
    found = _split_amount(e.preferences[i], x[i], e.preferences[j], x[j], total, _WITHDRAWAL_COMBOS[mode])
    if found is None:
        return None
    yi, yj, how = found
    text = (
        f"agent {j} withdraws; x_{i}+x_{j} = {_fmt(yi)}+{_fmt(yj)} = {_fmt(total)} = "
        f"phi_{i}(e')+w_{j} = {_fmt(stay[i])}+{_fmt(e.endowments[j])}; "
        f"agent {i}: {_fmt(yi)} vs {_fmt(x[i])} ({how[0]}), agent {j}: {_fmt(yj)} vs {_fmt(x[j])} ({how[1]})"
    )
    out = {"pair": (i, j), "mode": mode}
    details = {"shares": {i: yi, j: yj}, "total": total}
    return Witness("withdrawal", rule, e, out, (i, j), x, stay, text, e2, details)


def find_withdrawal(rule: RuleId, e: Economy, mode: str = "strict", pairs=None) -> Optional[Witness]:
    """First ordered pair ``(i, j)`` (``j`` withdraws, ``i`` stays) that can
    share ``phi_i(e') + w_j`` to the benefit of both."""
    for pair in _pairs(e, pairs):
        w = _withdrawal(rule, e, {"pair": pair, "mode": mode})
        if w is not None:
            return w
    return None


# -- merging -----------------------------------------------------------------

_MERGING_COMBOS = (("strict", "weak"), ("weak", "strict"), ("strict", "strict"))


@detector("merging")
def _merging(rule, e, params):
    i, j = params["pair"]
    if len(e) < 2:
        return None
    x = rule(e)
    e2 = e.without(j).with_endowments({i: e.endowments[i] + e.endowments[j]})
    merged = rule(e2)
    total = merged[i]
    found = _split_amount(e.preferences[i], x[i], e.preferences[j], x[j], total, _MERGING_COMBOS)
    if found is None:
        return None
    yi, yj, how = found
    text = (
        f"agent {j} hands its endowment to {i}; x_{i}+x_{j} = {_fmt(yi)}+{_fmt(yj)} = phi_{i}(e') = {_fmt(total)}; "
        f"agent {i}: {_fmt(yi)} vs {_fmt(x[i])} ({how[0]}), agent {j}: {_fmt(yj)} vs {_fmt(x[j])} ({how[1]})"
    )
    details = {"shares": {i: yi, j: yj}, "total": total}
    return Witness("merging", rule, e, {"pair": (i, j)}, (i, j), x, merged, text, e2, details)


def find_merging(rule: RuleId, e: Economy, pairs=None) -> Optional[Witness]:
    for pair in _pairs(e, pairs):
        w = _merging(rule, e, {"pair": pair})
        if w is not None:
            return w
    return None


# -- splitting ---------------------------------------------------------------


def fresh_id(e: Economy) -> int:
    """The smallest agent id not present in ``e``."""
    taken = set(e.agents)
    i = 1
    while i in taken:
        i += 1
    return i


@detector("splitting")
def _splitting(rule, e, params):
    return _split_case(rule, e, rule(e), params)


def _split_case(rule, e, x, params):
    host = params["host"]
    guest = params["guest"]
    pref = params["guest_pref"]
    keeps = as_rational(params["host_keeps"])
    if guest in e.preferences:
        raise InvalidBattery(f"guest id {guest} is already an agent")
    w = e.endowments[host]
    if not ZERO <= keeps <= w:
        raise InvalidBattery(f"host keeps {keeps}, outside [0, {w}]")
    e2 = e.with_endowments({host: keeps}).with_agent(guest, pref, w - keeps)
    try:
        y = rule(e2)
    except DomainError:
        # the split left someone without endowment where the rule is undefined
        return None
    gain = y[host] + y[guest]
    if not e.preferences[host].strictly_prefers(gain, x[host]):
        return None
    text = (
        f"host {host} keeps {_fmt(keeps)} and guest {guest} (peak {_fmt(pref.peak)}) gets {_fmt(w - keeps)}; "
        f"phi_{host}(e')+phi_{guest}(e') = {_fmt(y[host])}+{_fmt(y[guest])} = {_fmt(gain)} "
        f"preferred to phi_{host}(e) = {_fmt(x[host])}"
    )
    out = {"host": host, "guest": guest, "guest_pref": pref, "host_keeps": keeps}
    return Witness("splitting", rule, e, out, (host, guest), x, y, text, e2, {"combined": gain})


def default_guest_peaks(e: Economy) -> list:
    """0, every peak, every endowment and the total endowment."""
    vals = {ZERO, e.total()}
    vals.update(e.peak(i) for i in e.agents)
    vals.update(e.endowments[i] for i in e.agents)
    return sorted(vals)


def default_split_points(rule: RuleId, e: Economy, host: int, depth: int = 6) -> list:
    """Amounts the host keeps: a halving grid toward both ends of
    ``[0, w_host]`` plus the points where the host or the guest crosses a
    kink of the rule on ``e`` (peak minus the host's net trade, endowment
    minus another agent's claim)."""
    w = e.endowments[host]
    pts = {ZERO, w}
    step = w
    for _ in range(depth):
        step /= 2
        pts.add(step)
        pts.add(w - step)
    x = rule(e)
    net = x.net(host)
    pts.add(e.peak(host) - net)
    for k in e.agents:
        claim = e.peak(k) - e.endowments[k]
        pts.add(w - claim)
        pts.add(w - x.net(k))
    return sorted(v for v in pts if ZERO <= v <= w)


def find_splitting(
    rule: RuleId,
    e: Economy,
    guest_peaks: Optional[Sequence] = None,
    split_points: Optional[Sequence] = None,
    hosts: Optional[Iterable[int]] = None,
    guest_ids: Optional[Iterable[int]] = None,
    guest_weights: Sequence = ((1, 1),),
) -> Optional[Witness]:
    """Search hosts, guest peaks and splits (in that order) for a profitable
    split.  ``split_points`` are amounts kept by the host; values above a
    host's endowment are skipped.  Only falsifies: ``None`` means nothing was
    found on this battery."""
    if guest_peaks is not None and not list(guest_peaks):
        raise InvalidBattery("empty guest-peak battery")
    if split_points is not None and not list(split_points):
        raise InvalidBattery("empty split battery")
    peaks = default_guest_peaks(e) if guest_peaks is None else [as_rational(p) for p in guest_peaks]
    ids = [fresh_id(e)] if guest_ids is None else list(guest_ids)
    x = rule(e)
    for host in sorted(e.agents) if hosts is None else hosts:
        if x[host] == e.peak(host):
            continue  # already at its best amount
        if split_points is None:
            splits = default_split_points(rule, e, host)
        else:
            splits = [as_rational(s) for s in split_points if ZERO <= as_rational(s) <= e.endowments[host]]
        for guest in ids:
            for peak in peaks:
                for left, right in guest_weights:
                    pref = Preference(peak, left, right)
                    for keeps in splits:
                        params = {"host": host, "guest": guest, "guest_pref": pref, "host_keeps": keeps}
                        w = _split_case(rule, e, x, params)
                        if w is not None:
                            return w
    return None


# -- pre-delivery ------------------------------------------------------------


@detector("predelivery")
def _predelivery(rule, e, params):
    i, j = params["pair"]
    if len(e) < 2:
        return None
    x = rule(e)
    new_w = e.endowments[i] + e.endowments[j] - x[j]
    if new_w < 0:
        return None
    e2 = e.without(j).with_endowments({i: new_w})
    try:
        y = rule(e2)
    except DomainError:
        return None
    if not e.preferences[i].strictly_prefers(y[i], x[i]):
        return None
    text = (
        f"agent {j} receives phi_{j}(e) = {_fmt(x[j])} in advance and leaves; w_{i}' = {_fmt(new_w)}; "
        f"phi_{i}(e') = {_fmt(y[i])} preferred to phi_{i}(e) = {_fmt(x[i])}"
    )
    return Witness("predelivery", rule, e, {"pair": (i, j)}, (i, j), x, y, text, e2)


def find_predelivery(rule: RuleId, e: Economy, pairs=None) -> Optional[Witness]:
    for pair in _pairs(e, pairs):
        w = _predelivery(rule, e, {"pair": pair})
        if w is not None:
            return w
    return None


_NO_TEMPLATE = {"sprumont", "endowments"}


def predelivery_template(p1=1, p2=5, w1=3) -> Economy:
    """Three agents with ``0 < p1 = w2 = w3 < w1 < p2 = p3``."""
    p1, p2, w1 = as_rational(p1), as_rational(p2), as_rational(w1)
    if not ZERO < p1 < w1 < p2:
        raise ValueError("template needs 0 < p1 < w1 < p2")
    return Economy.build([p1, p2, p2], [w1, p1, p1])


def construct_predelivery_witness(rule: RuleId, template: Sequence = (1, 5, 3)) -> Witness:
    """Agent 1 pre-delivers to whichever of agents 2, 3 the rule leaves below
    ``w1``; that agent then strictly gains."""
    if rule.tag in _NO_TEMPLATE:
        raise UnsupportedRule(
            f"{rule} is outside the class the template covers "
            "(efficient, own-peak-only, endowments lower bound)"
        )
    e = predelivery_template(*template)
    x = rule(e)
    w1 = e.endowments[1]
    target = next((i for i in (2, 3) if x[i] < w1), None)
    if target is None:
        raise UnsupportedRule(f"{rule} gives agents 2 and 3 at least w1 on the template")
    w = _predelivery(rule, e, {"pair": (target, 1)})
    if w is None:
        raise UnsupportedRule(f"{rule}: agent {target} does not gain from pre-delivery on the template")
    return w


MANIPULATIONS = {
    "withdrawal": find_withdrawal,
    "merging": find_merging,
    "splitting": find_splitting,
    "predelivery": find_predelivery,
}
