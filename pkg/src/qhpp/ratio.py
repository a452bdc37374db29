"""Exact rational helpers shared across the package.

Every fractional quantity in this package is a ``fractions.Fraction``
(arbitrary precision, always in lowest terms, positive denominator).
No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or a bare integer string into a Fraction."""
    s = text.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_rational(x: Fraction | int) -> str:
    """Render a rational as ``"p/q"`` in lowest terms, or ``"n"`` for integers.

    The sign always sits on the numerator.
    """
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def is_positive_square(x: Fraction | int) -> bool:
    """True iff ``x`` is a positive integer that is a perfect square.

    Zero, negatives and non-integral rationals all fail.
    """
    f = Fraction(x)
    return f > 0 and f.denominator == 1 and is_perfect_square(f.numerator)


def rational_sqrt(x: Fraction | int) -> Fraction:
    """Exact square root of a non-negative rational.

    Raises ValueError when the root is irrational; approximations are never
    produced.
    """
    f = Fraction(x)
    if f < 0:
        raise ValueError(f"square root of negative rational {f}")
    rn = isqrt(f.numerator)
    rd = isqrt(f.denominator)
    if rn * rn != f.numerator or rd * rd != f.denominator:
        raise ValueError(f"{f} is not the square of a rational")
    return Fraction(rn, rd)
