"""Seeded economy generation and greedy witness shrinking."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .errors import ConfigError, ReallocError, StaleWitness
from .model import Economy, Preference
from .rational import ONE, ZERO, Rational, as_rational, floor
from .witness import Witness, detect, replay

DEFAULT_WEIGHTS = ((1, 1), (2, 1), (1, 2), (14, 1))


@dataclass(frozen=True)
class GenConfig:
    min_agents: int = 1
    max_agents: int = 6
    denominator: int = 4
    weights: tuple = DEFAULT_WEIGHTS
    seed: int = 0
    positive_endowments: bool = False
    max_id: int = 12
    scale: int = 16

    def __post_init__(self):
        if not 1 <= self.min_agents <= self.max_agents <= 8:
            raise ConfigError(f"agent range [{self.min_agents}, {self.max_agents}] must lie within [1, 8]")
        if self.denominator < 1:
            raise ConfigError("denominator bound must be at least 1")
        if self.max_id < self.max_agents:
            raise ConfigError("id pool smaller than the largest economy")
        if not self.weights or any(left <= 0 or right <= 0 for left, right in self.weights):
            raise ConfigError("weight set must be nonempty with positive weights")


def _value(rng: random.Random, bound: int, scale: int, positive: bool) -> Rational:
    d = rng.randint(1, bound)
    k = rng.randint(1 if positive else 0, scale * d)
    return Rational(k, d)


def generate_economy(config: GenConfig, index: int = 0) -> Economy:
    """Economy number ``index`` of the battery defined by ``config``.

    Each economy has its own generator seeded by ``(seed, index)``, so any
    single economy can be regenerated without replaying the others.
    """
    rng = random.Random(f"{config.seed}:{index}")
    n = rng.randint(config.min_agents, config.max_agents)
    ids = sorted(rng.sample(range(1, config.max_id + 1), n))
    prefs, endow = {}, {}
    for i in ids:
        left, right = config.weights[rng.randrange(len(config.weights))]
        peak = _value(rng, config.denominator, config.scale, False)
        prefs[i] = Preference(peak, left, right)
        endow[i] = _value(rng, config.denominator, config.scale, config.positive_endowments)
    return Economy(prefs, endow)


def generate_battery(config: GenConfig, count: int, start: int = 0) -> Iterator[Economy]:
    for index in range(start, start + count):
        yield generate_economy(config, index)


# -- shrinking ---------------------------------------------------------------


def _complexity(v: Rational) -> tuple:
    return (v.denominator, abs(v.numerator))


def _simpler_values(v: Rational, others) -> list:
    """Candidates strictly simpler than ``v``: 0, nearby integers, and other
    values already present in the economy."""
    cands = {ZERO, floor(v), floor(v + ONE / 2), floor(v) + 1}
    cands.update(others)
    cands = [c for c in cands if c >= 0 and c != v and _complexity(c) < _complexity(v)]
    return sorted(cands, key=_complexity)


def _involved(w: Witness) -> set:
    p = w.params
    out = set(w.agents)
    for key in ("agent", "host"):
        if key in p:
            out.add(p[key])
    if "pair" in p:
        out.update(p["pair"])
    if "prefs" in p:
        out.update(p["prefs"])
    return out


def _drop_agent(w: Witness, k: int) -> Optional[tuple]:
    e = w.economy
    if len(e) < 2:
        return None
    params = dict(w.params)
    if "subset" in params:
        subset = frozenset(params["subset"]) - {k}
        rest = frozenset(e.agents) - {k}
        if not subset or subset == rest:
            return None
        params["subset"] = subset
    if "endowments" in params:
        params["endowments"] = {i: v for i, v in params["endowments"].items() if i != k}
    return e.without(k), params


def _increments(w: Witness) -> Optional[dict]:
    if "endowments" not in w.params:
        return None
    return {i: as_rational(v) - w.economy.endowments[i] for i, v in w.params["endowments"].items()}


def _value_moves(w: Witness):
    """Yield ``(economy, params)`` candidates that simplify one number."""
    e = w.economy
    inc = _increments(w)
    values = {e.peak(i) for i in e.agents} | {e.endowments[i] for i in e.agents}
    for i in e.agents:
        pref = e.preferences[i]
        for v in _simpler_values(pref.peak, values):
            yield e.with_preferences({i: pref.with_peak(v)}), dict(w.params)
        for v in _simpler_values(e.endowments[i], values):
            params = dict(w.params)
            if inc is not None:
                params["endowments"] = {**params["endowments"], i: v + inc[i]}
            yield e.with_endowments({i: v}), params
        if (pref.left, pref.right) != (ONE, ONE):
            yield e.with_preferences({i: pref.with_weights(1, 1)}), dict(w.params)
    if inc is not None:
        for i, d in inc.items():
            for v in _simpler_values(d, ()):
                params = dict(w.params)
                params["endowments"] = {**params["endowments"], i: e.endowments[i] + v}
                yield e, params


def shrink_witness(w: Witness, check: Optional[Callable[[Witness], bool]] = None) -> Witness:
    """Greedily drop uninvolved agents and simplify numbers while the
    violation persists.  The result is locally minimal and always replays."""
    fresh = replay(w)
    if fresh is None or (check is not None and not check(fresh)):
        raise StaleWitness(f"{w.kind} witness does not replay; nothing to shrink")

    def attempt(e, params):
        try:
            cand = detect(w.kind, w.rule, e, params)
        except (ReallocError, ValueError, ZeroDivisionError):
            return None
        if cand is None or (check is not None and not check(cand)):
            return None
        return cand

    current = fresh
    changed = True
    while changed:
        changed = False
        keep = _involved(current)
        for k in current.economy.agents:
            if k in keep:
                continue
            moved = _drop_agent(current, k)
            if moved is None:
                continue
            cand = attempt(*moved)
            if cand is not None:
                current, changed = cand, True
                break
        if changed:
            continue
        for e, params in _value_moves(current):
            cand = attempt(e, params)
            if cand is not None:
                current, changed = cand, True
                break
    return current
