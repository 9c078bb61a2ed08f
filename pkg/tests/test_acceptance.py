"""Acceptance criteria 1-8, each at exact tolerance over the seeded battery.

Every test prints one ``CRITERION n PASS|FAIL`` line.  Batteries and axiom
tallies are cached per module so criteria that share them pay once.
"""

import time
from fractions import Fraction
from functools import lru_cache

import pytest

from realloc.axioms import check_envy_free_net_trades, check_os_endow_mono, check_os_pop_mono
from realloc.battery import CHARACTERIZATION, audit_economies, battery_config, lemma1_consistent
from realloc.econgen import generate_battery, shrink_witness
from realloc.iterative import check_step_conditions, derive_trace
from realloc.manipulation import construct_predelivery_witness, find_merging, find_splitting, find_withdrawal
from realloc.model import Economy
from realloc.reference import EXAMPLES, economy_2, economy_3
from realloc.rules import ALL_RULES, RuleId
from realloc.witness import confirm, replay

pytestmark = pytest.mark.slow

TRIALS = 10_000
SEED = 0
TRACE_RULES = ("uniform", "proportional", "priority", "max-satiating", "phi-bar", "phi-star", "endowments")
QUALIFYING = ("uniform", "proportional", "priority", "max-satiating", "phi-bar", "phi-star")


@lru_cache(maxsize=None)
def battery(tag: str) -> tuple:
    config = battery_config(RuleId(tag), max_agents=6, denominator=4, seed=SEED)
    return tuple(generate_battery(config, TRIALS))


@lru_cache(maxsize=None)
def tally(tag: str, axiom: str):
    return audit_economies(RuleId(tag), [axiom], battery(tag))[axiom]


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number} {'PASS' if ok else 'FAIL'}: {detail}")

    return emit


def test_criterion_1_example_replay(report):
    start = time.perf_counter()
    checks = [(key, check) for key, example in EXAMPLES.items() for check in example()]
    elapsed = time.perf_counter() - start
    bad = [f"example {key}: {check}" for key, check in checks if not check.ok]
    ok = not bad and elapsed < 1.0
    report(1, ok, f"{len(checks)} checks, {len(bad)} mismatches, {elapsed:.3f}s (limit 1s)")
    assert not bad, "\n".join(bad)
    assert elapsed < 1.0


def test_criterion_2_trace_round_trip(report):
    start = time.perf_counter()
    failures = {}
    for tag in TRACE_RULES:
        rule = RuleId(tag)
        mismatched = unmet = 0
        first = None
        for index, e in enumerate(battery(tag)):
            trace = derive_trace(rule, e)
            x = rule(e)
            if any(trace.final[i] != x[i] - e.endowments[i] for i in e.agents):
                mismatched += 1
                first = first or f"economy {index}: final net trade differs from the rule"
            conditions = check_step_conditions(trace)
            if not conditions.ok:
                unmet += 1
                first = first or f"economy {index}: {conditions.violations[0]}"
        if mismatched or unmet:
            failures[tag] = f"{mismatched} output mismatches, {unmet} condition failures; {first}"
    elapsed = time.perf_counter() - start
    detail = f"{len(TRACE_RULES)} rules x {TRIALS} economies in {elapsed:.1f}s (target 60s)"
    if failures:
        detail += "; failing: " + "; ".join(f"{t}: {msg}" for t, msg in failures.items())
    report(2, not failures and elapsed < 60, detail)
    assert not failures, failures
    assert elapsed < 60


def test_criterion_3_withdrawal_and_merging(report):
    hits = {}
    for tag in TRACE_RULES:
        rule = RuleId(tag)
        withdrawal = merging = 0
        first = None
        for e in battery(tag):
            w = find_withdrawal(rule, e, "strict")
            if w is not None:
                withdrawal += 1
                first = first or w
            m = find_merging(rule, e)
            if m is not None:
                merging += 1
                first = first or m
        if withdrawal or merging:
            assert replay(first) is not None
            hits[tag] = f"withdrawal {withdrawal}, merging {merging}; first: {first}"
    clean = [t for t in TRACE_RULES if t not in hits]
    detail = f"clean: {', '.join(clean) or 'none'}"
    if hits:
        detail += "; hits: " + "; ".join(f"{t}: {msg}" for t, msg in hits.items())
    report(3, not hits, detail)
    assert not hits, hits


def test_criterion_4_splitting(report):
    rule = RuleId("proportional")
    found = [(index, w) for index, e in enumerate(battery("proportional")) if (w := find_splitting(rule, e))]
    uniform, priority = RuleId("uniform"), RuleId("priority")
    ex2 = [find_splitting(uniform, economy_2(), guest_peaks=[4], split_points=[1]) for _ in range(2)]
    ex3 = [
        find_splitting(priority, economy_3(), guest_peaks=[4], split_points=[1], hosts=[4], guest_ids=[2])
        for _ in range(2)
    ]
    examples_ok = (
        ex2[0] is not None
        and ex3[0] is not None
        and ex2[0].details["combined"] == Fraction(10, 3)
        and ex2[0].before[1] == 3
        and ex3[0].details["combined"] == 5
        and ex3[0].before[4] == 2
        # same search twice gives the same witness
        and ex2[0].params == ex2[1].params
        and ex3[0].params == ex3[1].params
    )
    ok = not found and examples_ok
    detail = f"proportional: {len(found)} of {TRIALS} economies split profitably; examples reproduced: {examples_ok}"
    if found:
        detail += f"; first: economy {found[0][0]}: {found[0][1]}"
    report(4, ok, detail)
    assert not found
    assert examples_ok


def test_criterion_5_predelivery(report):
    results = {}
    for tag in QUALIFYING:
        w = confirm(construct_predelivery_witness(RuleId(tag)))
        i = w.params["pair"][0]
        results[tag] = w.economy.preferences[i].strictly_prefers(w.after[i], w.before[i])
    ok = all(results.values())
    report(5, ok, ", ".join(f"{t}={'witness' if v else 'none'}" for t, v in results.items()))
    assert ok


TABLE = {
    "phi-bar": "os-pop-mono",
    "max-satiating": "os-endow-mono",
    "sprumont": "elb",
}


def test_criterion_6_independence(report):
    problems = []
    lines = []
    # the fixed witnesses from the rule catalog
    pb = check_os_pop_mono(RuleId("phi-bar"), Economy.build([5, 5, 0, 0], [1, 1, 3, 3]), [{1, 2, 3}])
    ms = check_os_endow_mono(RuleId("max-satiating"), Economy.build([0, 9, 4], [3, 1, 1]), {1: 3, 2: 7, 3: 1})
    if not (pb.violated and ms.violated):
        problems.append("catalog witnesses do not replay")
    for tag, expected in TABLE.items():
        found = tally(tag, expected)
        if found.witness is None:
            problems.append(f"{tag}: no {expected} violation on the battery")
        else:
            small = shrink_witness(found.witness)
            lines.append(f"{tag} fails {expected} ({found.violations} economies, shrunk to {len(small.economy)} agents)")
        for axiom in CHARACTERIZATION:
            if axiom == expected:
                continue
            other = tally(tag, axiom)
            if other.violations:
                problems.append(f"{tag}: unexpected {axiom} violation: {other.witness}")
    report(6, not problems, "; ".join(lines + problems))
    assert not problems, problems


def test_criterion_7_lemma1(report):
    needed = ("own-peak-only", "elb", "os-endow-mono", "efficiency")
    flagged = []
    for rule in ALL_RULES:
        tallies = {axiom: tally(rule.tag, axiom) for axiom in needed}
        if not lemma1_consistent(tallies):
            flagged.append(f"{rule}: {tallies['efficiency'].witness}")
    report(7, not flagged, f"{len(ALL_RULES)} rules checked; inconsistent: {', '.join(flagged) or 'none'}")
    assert not flagged


def test_criterion_8_envy_free(report):
    uniform_bad = [i for i, e in enumerate(battery("uniform")) if check_envy_free_net_trades(e).violated]
    priority = RuleId("priority")
    witness = None
    for e in battery("priority"):
        result = check_envy_free_net_trades(e, priority)
        if result.violated:
            witness = confirm(result.witness)
            break
    ok = not uniform_bad and witness is not None
    detail = f"uniform violations: {len(uniform_bad)}; priority witness: {witness}"
    report(8, ok, detail)
    assert not uniform_bad
    assert witness is not None
