from fractions import Fraction

from hypothesis import settings, strategies as st

from realloc.model import Economy, Preference
from realloc.rules import RuleId

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

WEIGHTS = [(1, 1), (2, 1), (1, 2), (14, 1)]


def q(*vals):
    """Tuple of exact rationals from ints and "a/b" strings."""
    return tuple(Fraction(v) for v in vals)


def grid_value(max_num=64, denominator=4, positive=False):
    return st.builds(
        Fraction,
        st.integers(1 if positive else 0, max_num),
        st.integers(1, denominator),
    )


@st.composite
def economies(draw, min_agents=1, max_agents=5, positive=False):
    n = draw(st.integers(min_agents, max_agents))
    ids = sorted(draw(st.lists(st.integers(1, 12), min_size=n, max_size=n, unique=True)))
    prefs, endow = {}, {}
    for i in ids:
        left, right = draw(st.sampled_from(WEIGHTS))
        prefs[i] = Preference(draw(grid_value()), left, right)
        endow[i] = draw(grid_value(positive=positive))
    return Economy(prefs, endow)


RULE = {tag: RuleId(tag) for tag in ("uniform", "proportional", "priority", "max-satiating",
                                       "sprumont", "endowments", "phi-bar", "phi-star")}
