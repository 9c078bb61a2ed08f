"""The ``.econ`` text format for economies and witnesses.

Economy files hold one agent per line::

    # comment
    agent 3 peak=3.5 endow=0
    agent 1 peak=1 endow=9 left=14

Witness files prepend a ``WITNESS <kind> rule=<rule>`` line and one
``PARAM key=value`` line per detector parameter.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .errors import ParseError, ReallocError, StaleWitness
from .model import Economy, Preference
from .rational import as_rational, format_rational
from .rules import parse_rule
from .witness import Witness, detect

_RAT = re.compile(r"^[+-]?(\d+(/\d+)?|\d*\.\d+|\d+\.\d*)$")
_FIELDS = ("peak", "endow", "left", "right")


def parse_rational(text: str):
    if not _RAT.match(text):
        raise ValueError(f"not a rational: {text!r}")
    if "/" in text and int(text.split("/")[1]) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return as_rational(Fraction(text))


def _tokens(line: str):
    """Whitespace-separated tokens with their 1-based columns."""
    for m in re.finditer(r"\S+", line):
        yield m.group(), m.start() + 1


def parse_economy(text: str) -> Economy:
    prefs, endow = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = list(_tokens(line))
        if not toks:
            continue
        word, col = toks[0]
        if word != "agent":
            raise ParseError(f"expected 'agent', found {word!r}", lineno, col)
        if len(toks) < 2:
            raise ParseError("expected an agent id after 'agent'", lineno, len(line.rstrip()) + 1)
        ident, col = toks[1]
        if not ident.isdigit() or int(ident) < 1:
            raise ParseError(f"agent id must be a positive integer, found {ident!r}", lineno, col)
        i = int(ident)
        if i in prefs:
            raise ParseError(f"duplicate agent id {i}", lineno, col)
        fields = {}
        for tok, col in toks[2:]:
            key, eq, val = tok.partition("=")
            if not eq:
                raise ParseError(f"expected key=value, found {tok!r}", lineno, col)
            if key not in _FIELDS:
                raise ParseError(f"unknown field {key!r}; expected one of {', '.join(_FIELDS)}", lineno, col)
            if key in fields:
                raise ParseError(f"field {key!r} given twice", lineno, col)
            try:
                fields[key] = parse_rational(val)
            except ValueError:
                raise ParseError(f"expected a rational for {key}, found {val!r}", lineno, col + len(key) + 1) from None
        for key in ("peak", "endow"):
            if key not in fields:
                raise ParseError(f"agent {i} is missing {key}=", lineno)
        if fields["endow"] < 0:
            raise ParseError(f"agent {i}: endowment must be nonnegative", lineno)
        if fields["peak"] < 0:
            raise ParseError(f"agent {i}: peak must be nonnegative", lineno)
        left, right = fields.get("left", 1), fields.get("right", 1)
        if left <= 0 or right <= 0:
            raise ParseError(f"agent {i}: weights must be positive", lineno)
        prefs[i] = Preference(fields["peak"], left, right)
        endow[i] = fields["endow"]
    if not prefs:
        raise ParseError("no agents")
    return Economy(prefs, endow)


def serialize_economy(e: Economy) -> str:
    lines = []
    for i in e.agents:
        pref = e.preferences[i]
        line = f"agent {i} peak={format_rational(pref.peak)} endow={format_rational(e.endowments[i])}"
        if pref.left != 1:
            line += f" left={format_rational(pref.left)}"
        if pref.right != 1:
            line += f" right={format_rational(pref.right)}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- witness parameters ------------------------------------------------------


def _ids(text):
    return [int(t) for t in text.split(",") if t]


def _pref_text(p: Preference) -> str:
    return ",".join(format_rational(v) for v in (p.peak, p.left, p.right))


def _pref_parse(text: str) -> Preference:
    peak, left, right = (parse_rational(t) for t in text.split(","))
    return Preference(peak, left, right)


def _map_text(m: Mapping, fmt) -> str:
    return ";".join(f"{i}:{fmt(v)}" for i, v in sorted(m.items()))


def _map_parse(text: str, parse) -> dict:
    out = {}
    for item in text.split(";"):
        i, _, v = item.partition(":")
        out[int(i)] = parse(v)
    return out


_CODECS = {
    "agent": (str, int),
    "host": (str, int),
    "guest": (str, int),
    "mode": (str, str),
    "pair": (lambda p: f"{p[0]},{p[1]}", lambda t: tuple(_ids(t))),
    "subset": (lambda s: ",".join(str(i) for i in sorted(s)), lambda t: frozenset(_ids(t))),
    "prefs": (lambda m: _map_text(m, _pref_text), lambda t: _map_parse(t, _pref_parse)),
    "endowments": (lambda m: _map_text(m, format_rational), lambda t: _map_parse(t, parse_rational)),
    "guest_pref": (_pref_text, _pref_parse),
    "host_keeps": (format_rational, parse_rational),
}


def serialize_witness(w: Witness) -> str:
    lines = [f"WITNESS {w.kind} rule={w.rule}"]
    for key, value in w.params.items():
        lines.append(f"PARAM {key}={_CODECS[key][0](value)}")
    for text in w.comparison.splitlines():
        lines.append(f"# {text}")
    return "\n".join(lines) + "\n" + serialize_economy(w.economy)


def parse_witness(text: str) -> Witness:
    """Parse a witness file and re-detect the violation it records.

    Raises :class:`StaleWitness` when the stored instance is not (or no
    longer) a violation.
    """
    kind = rule = None
    params = {}
    body = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("WITNESS"):
            parts = stripped.split()
            if len(parts) != 3 or not parts[2].startswith("rule="):
                raise ParseError("expected 'WITNESS <kind> rule=<rule>'", lineno, 1)
            kind = parts[1]
            try:
                rule = parse_rule(parts[2][len("rule="):])
            except ReallocError as exc:
                raise ParseError(str(exc), lineno, len("WITNESS ") + len(kind) + 2) from None
            body.append("")
        elif stripped.startswith("PARAM"):
            key, eq, value = stripped[len("PARAM"):].strip().partition("=")
            if not eq or key not in _CODECS:
                raise ParseError(f"bad witness parameter {stripped!r}", lineno, 7)
            try:
                params[key] = _CODECS[key][1](value)
            except (ValueError, ReallocError) as exc:
                raise ParseError(f"bad value for {key}: {exc}", lineno, 7 + len(key) + 1) from None
            body.append("")
        else:
            body.append(raw)
    if kind is None:
        raise ParseError("missing WITNESS header")
    e = parse_economy("\n".join(body))
    w = detect(kind, rule, e, params)
    if w is None:
        raise StaleWitness(f"{kind} witness for {rule} does not replay")
    return w
