"""Run checkers over many economies and aggregate the outcome."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .axioms import AXIOMS, CheckResult
from .econgen import GenConfig, generate_battery
from .manipulation import MANIPULATIONS
from .model import Economy
from .rules import RuleId
from .witness import Witness

# the four properties characterizing the iterative rules
CHARACTERIZATION = ("own-peak-only", "elb", "os-endow-mono", "os-pop-mono")


@dataclass
class Tally:
    name: str
    rule: RuleId
    economies: int = 0
    cases: int = 0
    skipped: int = 0
    violations: int = 0
    witness: Optional[Witness] = None
    sampled: bool = False
    failing: set = field(default_factory=set)

    @property
    def status(self) -> str:
        if self.violations:
            return "violation"
        if self.skipped and not self.cases:
            return "inapplicable"
        return "pass"

    def add(self, index: int, result: CheckResult):
        self.economies += 1
        self.cases += result.cases
        self.skipped += result.skipped
        self.sampled = self.sampled or result.sampled
        if result.violated:
            self.violations += 1
            self.failing.add(index)
            if self.witness is None:
                self.witness = result.witness

    def line(self) -> str:
        scope = "sampled" if self.sampled else "exhaustive"
        return (
            f"check={self.name} rule={self.rule} status={self.status} economies={self.economies} "
            f"cases={self.cases} inapplicable={self.skipped} violations={self.violations} scope={scope}"
        )


def battery_config(rule: RuleId, **kwargs) -> GenConfig:
    """Generator settings for ``rule``; proportional needs positive endowments."""
    if rule.tag == "proportional":
        kwargs.setdefault("positive_endowments", True)
    return GenConfig(**kwargs)


def audit_economies(rule: RuleId, axioms: Iterable[str], economies: Iterable[Economy]) -> dict:
    tallies = {name: Tally(name, rule) for name in axioms}
    for index, e in enumerate(economies):
        for name, tally in tallies.items():
            tally.add(index, AXIOMS[name](rule, e))
    return tallies


def audit_battery(rule: RuleId, axioms: Iterable[str], config: GenConfig, trials: int) -> dict:
    return audit_economies(rule, axioms, generate_battery(config, trials))


def lemma1_consistent(tallies: dict) -> bool:
    """False only when the rule passes own-peak-only, ELB and endowment
    monotonicity on the whole battery yet fails efficiency somewhere."""
    needed = ("own-peak-only", "elb", "os-endow-mono", "efficiency")
    if any(n not in tallies for n in needed):
        raise ValueError(f"meta-check needs tallies for {', '.join(needed)}")
    premise = all(not tallies[n].violations for n in needed[:3])
    return not premise or not tallies["efficiency"].violations


def manipulation_economies(rule: RuleId, check: str, economies: Iterable[Economy], **kwargs) -> Tally:
    finder = MANIPULATIONS[check]
    tally = Tally(check, rule, sampled=(check == "splitting"))
    for index, e in enumerate(economies):
        w = finder(rule, e, **kwargs)
        tally.economies += 1
        tally.cases += 1
        if w is not None:
            tally.violations += 1
            tally.failing.add(index)
            if tally.witness is None:
                tally.witness = w
    return tally
