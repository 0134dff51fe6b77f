"""Helpers for exact rationals: parsing, JSON encoding, decimal rendering."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"num/den"`` or an integer literal into a Fraction.

    Decimal literals such as ``"1.5"`` are rejected on purpose: region math
    must never see a binary float.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    m = _RATIONAL_RE.match(str(text))
    if not m:
        raise ValueError(f"not a rational (expected 'num/den' or integer): {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def rational_to_json(x: Fraction) -> dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def rational_from_json(obj: Any) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Fraction(obj)
    if isinstance(obj, str):
        return parse_rational(obj)
    raise ValueError(f"cannot decode rational from {obj!r}")


def decimal_str(x: Fraction, digits: int = 12) -> str:
    """Deterministic decimal rendering (round half even at ``digits`` places)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    scaled = round(x * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10**digits)
    frac_s = str(frac).rjust(digits, "0").rstrip("0")
    return f"{sign}{whole}.{frac_s}" if frac_s else f"{sign}{whole}"


def fmt(x: Fraction) -> str:
    """Short human form: ``3/2`` or ``2``."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def pos(x: Fraction) -> Fraction:
    """Positive part ``(x)^+``."""
    return x if x > 0 else Fraction(0)
