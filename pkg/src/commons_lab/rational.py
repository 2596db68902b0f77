"""Exact rational helpers.

All arithmetic in the package goes through :class:`fractions.Fraction`; this
module only adds parsing, formatting and integer scaling used by the counting
kernels.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected on purpose: a float has already lost exactness.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(value: Fraction) -> str:
    """Serialize as ``"p"`` or ``"p/q"`` (canonical form)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = lcm(d, Fraction(v).denominator)
    return d


def scale_to_integers(values: Iterable[Fraction]) -> tuple[list[int], int]:
    """Return integers ``n_i`` and ``D`` with ``values[i] == n_i / D``."""
    values = [Fraction(v) for v in values]
    d = common_denominator(values)
    return [int(v * d) for v in values], d


def decimal_repr(value: Fraction, digits: int = 12) -> str:
    """Display-only decimal approximation."""
    value = Fraction(value)
    if value == 0:
        return "0"
    return f"{float(value):.{digits}g}" if abs(value) > Fraction(1, 10**300) else _tiny(value, digits)


def _tiny(value: Fraction, digits: int) -> str:
    # floats underflow below ~1e-308; fall back to an integer-exponent rendering
    sign = "-" if value < 0 else ""
    value = abs(value)
    exp = len(str(value.numerator)) - len(str(value.denominator))
    mant = value / Fraction(10) ** exp
    while mant < 1:
        mant *= 10
        exp -= 1
    while mant >= 10:
        mant /= 10
        exp += 1
    return f"{sign}{float(mant):.{digits}g}e{exp}"
