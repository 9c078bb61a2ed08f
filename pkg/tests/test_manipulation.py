from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import RULE, economies, q
from realloc.errors import InvalidBattery, UnsupportedRule
from realloc.manipulation import (
    construct_predelivery_witness,
    default_guest_peaks,
    default_split_points,
    find_merging,
    find_predelivery,
    find_splitting,
    find_withdrawal,
    fresh_id,
    predelivery_template,
)
from realloc.model import Economy
from realloc.witness import confirm, detect, replay

EXAMPLE_2 = Economy.build([4, 0, 2], [2, 2, 1])
EXAMPLE_3 = Economy.build([0, 6, 6], [4, 2, 2], ids=[1, 3, 4])
EXAMPLE_4 = Economy.build([1, 4, 3, 1], [3, 1, 1, 3])


def test_withdrawal_on_fourth_example():
    assert find_withdrawal(RULE["uniform"], EXAMPLE_4, "strict") is None
    w = find_withdrawal(RULE["uniform"], EXAMPLE_4, "weak", pairs=[(2, 4)])
    assert w.details["total"] == 5
    assert w.details["shares"] == {2: 4, 4: 1}
    # canonical order reaches another weak pair first
    assert find_withdrawal(RULE["uniform"], EXAMPLE_4, "weak").params["pair"] == (2, 1)


def test_withdrawal_at_peak_pair():
    e = Economy.build([2, 3], [2, 3])
    assert find_withdrawal(RULE["uniform"], e, "strict") is None
    assert find_withdrawal(RULE["uniform"], e, "weak") is None
    with pytest.raises(ValueError):
        detect("withdrawal", RULE["uniform"], e, {"pair": (1, 2), "mode": "both"})


def test_merging_on_second_example():
    # the supplier hands its 2 units to agent 1, who then sits at its peak
    w = find_merging(RULE["uniform"], EXAMPLE_2)
    assert w.params["pair"] == (1, 2)
    assert w.details["total"] == 4
    assert w.details["shares"] == {1: 4, 2: 0}
    assert w.before.as_tuple() == q(3, 0, 2)


def test_merging_counterexamples_for_uniform():
    demand = Economy.build([0, 4, 4], [4, 0, 0], ids=[2, 8, 11])
    w = find_merging(RULE["uniform"], demand, pairs=[(8, 2)])
    assert w.details["shares"] == {8: 4, 2: 0}
    supply = Economy.build([11, 0, 0], [0, 11, 11], ids=[2, 5, 12])
    w = find_merging(RULE["uniform"], supply, pairs=[(2, 5)])
    assert w.details["shares"] == {2: 11, 5: 0}
    assert w.before.as_tuple() == q(11, "11/2", "11/2")


def test_merging_when_nothing_moves():
    e = Economy.build([3, 2], [3, 2])
    assert find_merging(RULE["uniform"], e) is None


def test_splitting_examples():
    w = find_splitting(RULE["uniform"], EXAMPLE_2, guest_peaks=[4], split_points=[1])
    assert w.after.as_tuple() == q("5/3", 0, "5/3", "5/3")
    assert w.details["combined"] == Fraction(10, 3)
    assert w.before[1] == 3
    w = find_splitting(RULE["priority"], EXAMPLE_3, guest_peaks=[4], split_points=[1], hosts=[4], guest_ids=[2])
    assert w.after.as_tuple() == q(0, 4, 3, 1)
    assert w.details["combined"] == 5
    assert w.before[4] == 2


def test_splitting_battery_validation():
    with pytest.raises(InvalidBattery):
        find_splitting(RULE["uniform"], EXAMPLE_2, guest_peaks=[])
    with pytest.raises(InvalidBattery):
        find_splitting(RULE["uniform"], EXAMPLE_2, split_points=[])
    with pytest.raises(InvalidBattery):
        detect("splitting", RULE["uniform"], EXAMPLE_2,
               {"host": 1, "guest": 2, "guest_pref": EXAMPLE_2.preferences[1], "host_keeps": 1})


def test_split_defaults():
    assert fresh_id(EXAMPLE_3) == 2
    assert default_guest_peaks(EXAMPLE_2) == sorted({0, 1, 2, 4, 5})
    pts = default_split_points(RULE["uniform"], EXAMPLE_2, 1)
    assert pts[0] == 0 and pts[-1] == 2 and Fraction(1, 32) in pts and Fraction(63, 32) in pts


def test_predelivery_search():
    e = Economy.build([1, 5, 5], [3, 1, 1])
    w = find_predelivery(RULE["uniform"], e)
    assert w.params["pair"] == (2, 1)
    assert w.variant.endowments[2] == 3
    assert (w.before[2], w.after[2]) == (2, 3)
    assert find_predelivery(RULE["endowments"], e) is None
    assert find_predelivery(RULE["uniform"], Economy.build([1, 2], [1, 2])) is None


@pytest.mark.parametrize("tag", ["uniform", "proportional", "priority", "max-satiating", "phi-bar", "phi-star"])
def test_predelivery_construction(tag):
    w = confirm(construct_predelivery_witness(RULE[tag]))
    i, j = w.params["pair"]
    assert j == 1 and i in (2, 3)
    assert w.economy == predelivery_template()
    assert w.economy.preferences[i].strictly_prefers(w.after[i], w.before[i])


def test_predelivery_construction_values():
    w = construct_predelivery_witness(RULE["uniform"])
    assert (w.before[2], w.after[2]) == (2, 3)
    w = construct_predelivery_witness(RULE["priority"])
    assert w.before.as_tuple() == q(1, 3, 1)
    assert (w.params["pair"], w.after[3]) == ((3, 1), 3)


@pytest.mark.parametrize("tag", ["sprumont", "endowments"])
def test_predelivery_construction_refuses(tag):
    with pytest.raises(UnsupportedRule):
        construct_predelivery_witness(RULE[tag])


def test_bad_template():
    with pytest.raises(ValueError):
        construct_predelivery_witness(RULE["uniform"], (3, 5, 1))


@given(economies(min_agents=2, max_agents=4), st.sampled_from(["uniform", "priority", "max-satiating", "phi-star"]))
def test_manipulation_witnesses_replay(e, tag):
    rule = RULE[tag]
    for w in (
        find_withdrawal(rule, e, "weak"),
        find_merging(rule, e),
        find_predelivery(rule, e),
    ):
        if w is not None:
            fresh = replay(w)
            assert fresh is not None and fresh.details == w.details


@given(economies(min_agents=2, max_agents=4))
def test_uniform_withdrawal_strict_is_clean(e):
    assert find_withdrawal(RULE["uniform"], e, "strict") is None
