"""Built-in worked examples with their expected values.

Each example returns a list of :class:`Check` records comparing a computed
value against the stored one bit-exactly.  ``replay --example`` prints them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .iterative import derive_trace, uniform_lambda_trace
from .manipulation import find_splitting, find_withdrawal
from .model import Economy, Preference
from .rational import Rational, as_rational, format_rational
from .rules import RuleId


@dataclass(frozen=True)
class Check:
    label: str
    got: object
    expected: object

    @property
    def ok(self) -> bool:
        return self.got == self.expected

    def __str__(self):
        mark = "ok" if self.ok else "MISMATCH"
        return f"{self.label} got={_show(self.got)} expected={_show(self.expected)} {mark}"


def _show(v) -> str:
    if isinstance(v, tuple):
        return "(" + ", ".join(_show(x) for x in v) + ")"
    if isinstance(v, (frozenset, set)):
        return "{" + ",".join(str(x) for x in sorted(v)) + "}"
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (int, Rational)):
        return format_rational(v)
    return str(v)


def _q(*vals) -> tuple:
    return tuple(as_rational(v) for v in vals)


UNIFORM = RuleId("uniform")
PRIORITY = RuleId("priority")
PHI_STAR = RuleId("phi-star")


def economy_1() -> Economy:
    return Economy.build([0, 2, "7/2", 10], [9, 1, 0, 2])


def economy_2() -> Economy:
    return Economy.build([4, 0, 2], [2, 2, 1])


def economy_3() -> Economy:
    return Economy.build([0, 6, 6], [4, 2, 2], ids=[1, 3, 4])


def economy_4() -> Economy:
    return Economy.build([1, 4, 3, 1], [3, 1, 1, 3])


def economy_b1(flipped: bool = False) -> Economy:
    # agent 1 strictly prefers 0 to 14 unless flipped
    weights = {1: (14, 1) if flipped else (1, 14)}
    return Economy.build([1, 7, 9], [9, 1, 4], weights=weights)


def example_1() -> list:
    e = economy_1()
    out = [Check("uniform", UNIFORM(e).as_tuple(), _q(0, 2, "7/2", "13/2"))]
    trace = derive_trace(UNIFORM, e)
    expected = [_q(-9, 3, 3, 3), _q(-9, 1, 4, 4), _q(-9, 1, "7/2", "9/2")]
    for step, q in zip(trace.steps[1:], expected):
        out.append(Check(f"q^{step.t}", tuple(step.net_trades[i] for i in e.agents), q))
    lam = uniform_lambda_trace(e)
    for step, (lv, frozen) in zip(lam.steps[1:], [(3, {1}), (4, {1, 2}), ("9/2", {1, 2, 3})]):
        out.append(Check(f"lambda^{step.t}", step.lam, _q(lv)[0]))
        out.append(Check(f"N^{step.t}", frozenset(step.frozen), frozenset(frozen)))
    return out


def example_2() -> list:
    e = economy_2()
    out = [Check("uniform", UNIFORM(e).as_tuple(), _q(3, 0, 2))]
    w = find_splitting(UNIFORM, e, guest_peaks=[4], split_points=[1])
    out.append(Check("split found", w is not None, True))
    if w is not None:
        out.append(Check("uniform after split", w.after.as_tuple(), _q("5/3", 0, "5/3", "5/3")))
        out.append(Check("host + guest", w.details["combined"], _q("10/3")[0]))
        out.append(Check("host before", w.before[1], _q(3)[0]))
    return out


def example_3() -> list:
    e = economy_3()
    out = [Check("priority", PRIORITY(e).as_tuple(), _q(0, 6, 2))]
    w = find_splitting(PRIORITY, e, guest_peaks=[4], split_points=[1], hosts=[4], guest_ids=[2])
    out.append(Check("split found", w is not None, True))
    if w is not None:
        out.append(Check("priority after split", w.after.as_tuple(), _q(0, 4, 3, 1)))
        out.append(Check("host + guest", w.details["combined"], _q(5)[0]))
        out.append(Check("host before", w.before[4], _q(2)[0]))
    return out


def example_4() -> list:
    e = economy_4()
    out = [
        Check("uniform", UNIFORM(e).as_tuple(), _q(1, 3, 3, 1)),
        Check("uniform without 4", UNIFORM(e.without(4)).as_tuple(), _q(1, 2, 2)),
        Check("strict withdrawal", find_withdrawal(UNIFORM, e, "strict"), None),
    ]
    w = find_withdrawal(UNIFORM, e, "weak", pairs=[(2, 4)])
    out.append(Check("weak withdrawal found", w is not None, True))
    if w is not None:
        shares = w.details["shares"]
        out.append(Check("x_2 + x_4", w.details["total"], _q(5)[0]))
        out.append(Check("x_2", shares[2], _q(4)[0]))
        out.append(Check("x_4", shares[4], _q(1)[0]))
    return out


def example_b1() -> list:
    e = economy_b1()
    flipped = economy_b1(flipped=True)
    misreport = e.with_preferences({2: Preference("11/2")})
    pref1 = e.preferences[1]
    return [
        Check("0 P_1 14", pref1.strictly_prefers(0, 14), True),
        Check("14 P~_1 0", flipped.preferences[1].strictly_prefers(14, 0), True),
        Check("phi-star", PHI_STAR(e).as_tuple(), _q(1, 4, 9)),
        Check("phi-star flipped", PHI_STAR(flipped).as_tuple(), _q(1, 5, 8)),
        Check("agent 2 misreports 11/2", PHI_STAR(misreport)[2], _q("11/2")[0]),
    ]


EXAMPLES = {"1": example_1, "2": example_2, "3": example_3, "4": example_4, "B1": example_b1}
