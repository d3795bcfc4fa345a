"""Parsing and printing of exact rationals.

``fractions.Fraction`` is the rational type throughout the package; it is
always stored in lowest terms with a positive denominator.
"""
from __future__ import annotations

import decimal
import re
from fractions import Fraction

from .errors import InputError

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Parse an int, a decimal integer string or a ``"p/q"`` string exactly.

    Floats are rejected on purpose: they would silently import rounding.
    """
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise InputError(f"not a rational: {value!r}")
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise InputError(f"zero denominator: {value!r}")
        return Fraction(int(m.group(1)), den)
    raise InputError(f"not a rational: {value!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def decimal_string(x: Fraction, digits: int = 17) -> str:
    """17 significant digits, computed from the exact value (no float detour)."""
    x = Fraction(x)
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)
    d = ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
    return format(d, "g") if d != 0 else "0"


def rational_fields(name: str, x: Fraction) -> dict[str, str]:
    return {name: format_rational(x), f"{name}_decimal": decimal_string(x)}
