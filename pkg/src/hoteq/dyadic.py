"""Dyadic bit levels: ``bit(i)`` is the multiples of ``2**-i`` inside ``[0, R]``."""

from __future__ import annotations

import math
from fractions import Fraction

from .core import HoteqError, as_rational


def bit_level(x) -> int | None:
    """Least ``i`` with ``x`` a multiple of ``2**-i``; None if not dyadic."""
    d = as_rational(x).denominator
    if d & (d - 1):
        return None
    return d.bit_length() - 1


def in_bit(x, i: int) -> bool:
    lvl = bit_level(x)
    return lvl is not None and lvl <= i


def next_in_bit(x, i: int, direction: str = "right", R=None) -> Fraction:
    """Closest point of ``bit(i)`` strictly right (or left) of ``x``."""
    x = as_rational(x)
    scale = 1 << i
    k = math.floor(x * scale)
    if direction == "right":
        y = Fraction(k + 1, scale)
    elif direction == "left":
        y = Fraction(k - 1 if k == x * scale else k, scale)
    else:
        raise HoteqError(f"direction must be 'left' or 'right', not {direction!r}")
    if y < 0 or (R is not None and y > as_rational(R)):
        raise HoteqError(f"no bit({i}) neighbour of {x} inside [0, R]")
    return y


def bit_points(i: int, lo, hi, closed: bool = False) -> list:
    """Points of level at most ``i`` in ``(lo, hi)`` (``[lo, hi]`` if closed)."""
    lo, hi = as_rational(lo), as_rational(hi)
    scale = 1 << i
    k0 = math.ceil(lo * scale)
    k1 = math.floor(hi * scale)
    pts = [Fraction(k, scale) for k in range(k0, k1 + 1)]
    if not closed:
        pts = [p for p in pts if lo < p < hi]
    return pts
