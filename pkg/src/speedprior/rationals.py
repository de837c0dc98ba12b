"""Exact rational values and their wire formats.

All probabilities, prior masses and interval endpoints in this package are
`fractions.Fraction` instances; nothing in the numeric core ever rounds.
Rationals cross external boundaries (CLI flags, JSON) either as a
"num/den" string or as a {"num": ..., "den": ...} object.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["parse_rational", "format_rational", "rational_to_pair", "rational_from_pair"]


def parse_rational(text: str) -> Fraction:
    """Parse "num/den" (or a bare integer) into an exact Fraction."""
    text = text.strip()
    try:
        if "/" in text:
            num_s, den_s = text.split("/", 1)
            value = Fraction(int(num_s), int(den_s))
        else:
            value = Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational 'num/den' value: {text!r}") from exc
    return value


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def rational_to_pair(value: Fraction) -> dict[str, int]:
    return {"num": value.numerator, "den": value.denominator}


def rational_from_pair(pair: dict) -> Fraction:
    return Fraction(int(pair["num"]), int(pair["den"]))
