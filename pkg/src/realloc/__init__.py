"""Exact reallocation rules for one-commodity economies with single-peaked
preferences, their step-by-step traces, and axiom / manipulation audits."""

from .errors import ReallocError
from .iterative import check_cross_conditions, check_step_conditions, derive_trace, uniform_lambda_trace
from .model import Allocation, Comparison, Economy, Interval, Preference, prefers
from .rational import Rational, as_rational, format_rational
from .rules import ALL_RULES, AgentOrder, RuleId, parse_rule
from .witness import Witness, replay

__all__ = [
    "ReallocError",
    "Allocation",
    "Comparison",
    "Economy",
    "Interval",
    "Preference",
    "prefers",
    "Rational",
    "as_rational",
    "format_rational",
    "ALL_RULES",
    "AgentOrder",
    "RuleId",
    "parse_rule",
    "derive_trace",
    "uniform_lambda_trace",
    "check_step_conditions",
    "check_cross_conditions",
    "Witness",
    "replay",
]

__version__ = "0.1.0"
