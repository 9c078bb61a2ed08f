"""Replayable violation records.

A witness stores only what is needed to re-detect the violation: the kind,
the rule, the economy and a small parameter dict (which agent, which
perturbation, which pair...).  Allocations and the welfare comparison are
kept for display, but :func:`replay` recomputes everything from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional

from .errors import StaleWitness
from .model import Allocation, Economy
from .rules import RuleId

Detector = Callable[[RuleId, Economy, Mapping], Optional["Witness"]]

_DETECTORS: dict[str, Detector] = {}


@dataclass(frozen=True)
class Witness:
    kind: str
    rule: RuleId
    economy: Economy
    params: Mapping = field(default_factory=dict)
    agents: tuple = ()
    before: Optional[Allocation] = None
    after: Optional[Allocation] = None
    comparison: str = ""
    variant: Optional[Economy] = None
    # computed quantities such as the division chosen by a manipulating pair
    details: Mapping = field(default_factory=dict)

    def with_economy(self, e: Economy, params: Optional[Mapping] = None) -> "Witness":
        return replace(self, economy=e, params=dict(self.params if params is None else params))

    def __str__(self):
        agents = ",".join(str(i) for i in self.agents)
        return f"{self.kind} rule={self.rule} agents={agents}: {self.comparison}"


def detector(kind: str):
    """Register the function that decides one witness kind."""

    def register(fn: Detector) -> Detector:
        _DETECTORS[kind] = fn
        return fn

    return register


def kinds() -> tuple:
    return tuple(sorted(_DETECTORS))


def detect(kind: str, rule: RuleId, e: Economy, params: Mapping) -> Optional[Witness]:
    _load()
    try:
        fn = _DETECTORS[kind]
    except KeyError:
        raise ValueError(f"unknown witness kind {kind!r}") from None
    return fn(rule, e, params)


def replay(w: Witness) -> Optional[Witness]:
    """Re-detect ``w`` from its kind, rule, economy and parameters.

    Returns the freshly computed witness, or ``None`` when the stored instance
    is no longer a violation.
    """
    return detect(w.kind, w.rule, w.economy, w.params)


def confirm(w: Witness) -> Witness:
    fresh = replay(w)
    if fresh is None:
        raise StaleWitness(f"{w.kind} witness for {w.rule} does not replay")
    return fresh


def _load():
    # detectors live next to their checkers; importing registers them
    from . import axioms, manipulation  # noqa: F401
