"""Exact rationals backed by GMP.

``gmpy2.mpq`` compares and hashes equal to :class:`fractions.Fraction`, so
callers may pass either; everything computed inside the package is an mpq.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2

Rational = gmpy2.mpq

ZERO = Rational(0)
ONE = Rational(1)


def as_rational(value) -> Rational:
    """Coerce ints, Fractions, mpqs and exact strings (``"7/2"``, ``"3.5"``)."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, (bool, float)):
        raise TypeError(f"refusing inexact value {value!r}; pass an int, Fraction or string")
    if isinstance(value, int):
        return Rational(value)
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        # Fraction's parser handles "a/b" and finite decimals exactly
        f = Fraction(value)
        return Rational(f.numerator, f.denominator)
    if type(value).__name__ == "mpz":
        return Rational(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def floor(x: Rational) -> Rational:
    return Rational(x.numerator // x.denominator)


def ceil(x: Rational) -> Rational:
    return Rational(-((-x.numerator) // x.denominator))


def format_rational(x) -> str:
    """Lowest-terms ``a/b``, or ``a`` for integers."""
    x = as_rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
