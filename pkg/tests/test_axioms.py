from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import RULE, economies, q
from realloc.axioms import (
    AXIOMS,
    check_efficiency,
    check_elb,
    check_envy_free_net_trades,
    check_lemma2_satiation,
    check_non_bossiness,
    check_os_endow_mono,
    check_os_pop_mono,
    check_own_peak_only,
    check_peak_only,
    check_strategy_proofness,
    endowment_battery,
    misreport_battery,
    proper_subsets,
    run_axiom,
    weight_perturbations,
)
from realloc.battery import audit_economies, lemma1_consistent
from realloc.errors import InvalidPerturbation
from realloc.model import Economy, Preference
from realloc.rules import RuleId
from realloc.witness import confirm, replay

EXAMPLE_1 = Economy.build([0, 2, "7/2", 10], [9, 1, 0, 2])
EXAMPLE_2 = Economy.build([4, 0, 2], [2, 2, 1])
EXAMPLE_4 = Economy.build([1, 4, 3, 1], [3, 1, 1, 3])
B1 = Economy.build([1, 7, 9], [9, 1, 4], weights={1: (1, 14)})
ELB_CASE = Economy.build([4, 3], [0, 4], weights={2: (2, 1)})


def test_efficiency():
    assert check_efficiency(RULE["uniform"], EXAMPLE_1).status == "pass"
    assert check_efficiency(RULE["phi-star"], B1).status == "pass"
    result = check_efficiency(RULE["endowments"], EXAMPLE_1)
    assert result.violated and result.witness.agents == (1,)


def test_elb():
    assert check_elb(RULE["proportional"], EXAMPLE_2).status == "pass"
    result = check_elb(RULE["sprumont"], ELB_CASE)
    assert result.violated and result.witness.agents == (2,)
    balanced = Economy.build([1, 3], [2, 2])
    assert all(check_elb(r, balanced).status == "pass" for r in RULE.values())


def test_own_peak_only():
    assert check_own_peak_only(RULE["phi-star"], B1).status == "pass"
    assert check_own_peak_only(RULE["uniform"], EXAMPLE_1).status == "pass"


def test_own_peak_only_catches_a_weight_reading_rule(monkeypatch):
    # a rule that hands agent 1 extra whenever its left weight is large
    real = RuleId.apply

    def weighted(self, e, *, strict_domain=True):
        x = real(self, e, strict_domain=strict_domain)
        if self.tag != "endowments" or 1 not in e.agents or e.preferences[1].left == 1 or len(e) < 2:
            return x
        other = e.agents[1]
        amounts = dict(x.amounts)
        give = min(amounts[other], Fraction(1))
        amounts[1] += give
        amounts[other] -= give
        return type(x)(e, amounts)

    monkeypatch.setattr(RuleId, "apply", weighted)
    result = check_own_peak_only(RULE["endowments"], EXAMPLE_1)
    assert result.violated


def test_peak_only():
    result = check_peak_only(RULE["phi-star"], B1)
    assert result.violated
    assert result.witness.before.as_tuple() == q(1, 4, 9)
    assert result.witness.after.as_tuple() == q(1, 5, 8)
    assert check_peak_only(RULE["uniform"], EXAMPLE_1).status == "pass"
    assert check_peak_only(RULE["priority"], EXAMPLE_4).status == "pass"


def test_strategy_proofness():
    misreport = {2: Preference(Fraction(11, 2))}
    result = check_strategy_proofness(RULE["phi-star"], B1, [misreport])
    assert result.violated
    assert result.witness.after[2] == Fraction(11, 2)
    assert check_strategy_proofness(RULE["endowments"], EXAMPLE_1).status == "pass"
    assert check_strategy_proofness(RULE["uniform"], EXAMPLE_1).status == "pass"


def test_non_bossiness():
    flip = {1: Preference(1, 14, 1)}
    result = check_non_bossiness(RULE["phi-star"], B1, [flip])
    assert result.violated and result.witness.after[1] == 1
    assert check_non_bossiness(RULE["uniform"], EXAMPLE_1).status == "pass"
    assert check_non_bossiness(RULE["uniform"], Economy.build([3], [1])).status == "pass"


def test_os_endow_mono_table_witness():
    e = Economy.build([0, 9, 4], [3, 1, 1])
    result = check_os_endow_mono(RULE["max-satiating"], e, {1: 3, 2: 7, 3: 1})
    assert result.violated
    w = result.witness
    assert w.variant.excess() == 2
    assert (w.before[3], w.after[3]) == (4, 2)


def test_os_endow_mono_other_cases():
    assert check_os_endow_mono(RULE["uniform"], EXAMPLE_2, dict(EXAMPLE_2.endowments)).status == "pass"
    assert check_os_endow_mono(RULE["uniform"], EXAMPLE_2, {1: 2, 2: 2, 3: 2}).status == "pass"
    # excess demand turned into excess supply: neither clause applies
    e = Economy.build([5, 0], [1, 1])
    assert check_os_endow_mono(RULE["uniform"], e, {1: 1, 2: 9}).status == "inapplicable"
    with pytest.raises(InvalidPerturbation):
        check_os_endow_mono(RULE["uniform"], e, {1: 0, 2: 1})


def test_os_endow_mono_ledger_counterexamples():
    prop = Economy.build([5, 5, 5], [1, 1, 11], ids=[6, 7, 10])
    result = check_os_endow_mono(RULE["proportional"], prop, {6: 1, 7: Fraction(5, 4), 10: 11})
    assert result.violated and result.witness.after[6] == Fraction(11, 3)
    star = Economy.build([5, 12, 5], [0, 0, 12], ids=[1, 5, 12])
    result = check_os_endow_mono(RULE["phi-star"], star, {1: 0, 5: 8, 12: 12})
    assert result.violated and (result.witness.before[1], result.witness.after[1]) == (5, 3)


def test_os_pop_mono():
    e = Economy.build([5, 5, 0, 0], [1, 1, 3, 3])
    result = check_os_pop_mono(RULE["phi-bar"], e, [{1, 2, 3}])
    assert result.violated
    w = result.witness
    assert (w.before[1], w.after[1], w.before[2], w.after[2]) == (3, 4, 5, 1)
    assert check_os_pop_mono(RULE["uniform"], EXAMPLE_4, [{1, 2, 3}]).status == "pass"
    assert check_os_pop_mono(RULE["uniform"], EXAMPLE_4, [{i} for i in EXAMPLE_4.agents]).status == "pass"
    star = Economy.build([0, 2, 10, 10], [0, 10, 0, 0], ids=[3, 4, 7, 12], weights={4: (14, 1)})
    assert check_os_pop_mono(RULE["phi-star"], star, [{4, 7, 12}]).violated


def test_lemma2():
    assert check_lemma2_satiation(RULE["uniform"], EXAMPLE_1).status == "pass"
    assert check_lemma2_satiation(RULE["sprumont"], ELB_CASE).violated
    assert check_lemma2_satiation(RULE["sprumont"], Economy.build([1, 3], [2, 2])).status == "pass"


def test_envy_free():
    assert check_envy_free_net_trades(EXAMPLE_1).status == "pass"
    assert check_envy_free_net_trades(EXAMPLE_4).status == "pass"
    assert check_envy_free_net_trades(Economy.build([2], [5])).status != "violation"
    e = Economy.build([0, 6, 6], [4, 2, 2], ids=[1, 3, 4])
    assert check_envy_free_net_trades(e, RULE["priority"]).violated


def test_batteries():
    assert len(weight_perturbations(EXAMPLE_4)) > 0
    assert all(len(p) == 1 for p in misreport_battery(EXAMPLE_4, 2))
    assert len(misreport_battery(EXAMPLE_4, 2, size=10)) <= 10
    for new in endowment_battery(EXAMPLE_4):
        assert all(new[i] >= EXAMPLE_4.endowments[i] for i in EXAMPLE_4.agents)
    assert list(proper_subsets((1, 2, 3))) == [
        frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3}),
        frozenset({1}), frozenset({2}), frozenset({3}),
    ]


def test_run_axiom_names():
    assert set(AXIOMS) >= {"efficiency", "elb", "own-peak-only", "os-endow-mono", "os-pop-mono", "envy-free"}
    with pytest.raises(ValueError):
        run_axiom("monotone", RULE["uniform"], EXAMPLE_1)


def test_lemma1_meta_check():
    rule = RULE["endowments"]
    tallies = audit_economies(rule, ["own-peak-only", "elb", "os-endow-mono", "efficiency"], [EXAMPLE_1])
    # endowments is inefficient but also fails endowment monotonicity, so the premise is false
    assert tallies["efficiency"].violations == 1
    assert lemma1_consistent(tallies)
    with pytest.raises(ValueError):
        lemma1_consistent({"elb": tallies["elb"]})


@given(economies(max_agents=4), st.sampled_from(sorted(AXIOMS)), st.sampled_from(list(RULE)))
def test_witnesses_replay(e, axiom, tag):
    rule = RULE[tag]
    if tag == "proportional" and any(w == 0 for w in e.endowments.values()):
        return
    result = run_axiom(axiom, rule, e)
    if result.witness is not None:
        fresh = confirm(result.witness)
        assert fresh.comparison == result.witness.comparison
        assert replay(result.witness) is not None
