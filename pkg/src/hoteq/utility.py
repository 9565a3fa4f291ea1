"""Vote shares of candidates and of hypothetical entrants."""

from __future__ import annotations

from bisect import bisect_left, insort
from fractions import Fraction
from typing import NamedTuple, Sequence

from .core import NEG_INF, POS_INF, HoteqError, Voters, as_rational, mu, neighbours


class Utility(NamedTuple):
    total: Fraction
    left: Fraction
    right: Fraction


def window_utility(left_nb, s: Fraction, right_nb, voters: Voters) -> Utility:
    """Votes of a candidate at ``s`` whose neighbours sit at ``left_nb``/``right_nb``.

    Voters exactly on a switching point are split evenly between the two
    candidates it separates.
    """
    lo, hi = mu(left_nb, s), mu(s, right_nb)
    left = voters.cdf_left(s) - voters.cdf_left(lo) - voters.atom_at(lo) / 2
    right = voters.cdf(hi) - voters.cdf(s) - voters.atom_at(hi) / 2
    return Utility(left + right + voters.atom_at(s), left, right)


def util(s, S: Sequence, voters: Voters) -> Utility:
    s = as_rational(s)
    j = bisect_left(S, s)
    if j == len(S) or S[j] != s:
        raise HoteqError(f"{s} is not occupied in the profile")
    a, b = neighbours(S, j)
    return window_utility(a, s, b, voters)


def utilout(z, S: Sequence, voters: Voters) -> Fraction:
    """Utility of a new candidate entering at ``z``."""
    z = as_rational(z)
    j = bisect_left(S, z)
    if j < len(S) and S[j] == z:
        raise HoteqError(f"{z} is already occupied")
    a = S[j - 1] if j > 0 else NEG_INF
    b = S[j] if j < len(S) else POS_INF
    return window_utility(a, z, b, voters).total


def utilities(S: Sequence, voters: Voters) -> list:
    return [window_utility(*_triple(S, j), voters).total for j in range(len(S))]


def _triple(S, j):
    a = S[j - 1] if j > 0 else NEG_INF
    b = S[j + 1] if j + 1 < len(S) else POS_INF
    return a, S[j], b


def move(S: Sequence, j: int, z) -> tuple:
    """Profile with candidate ``j`` relocated to ``z`` (re-sorted)."""
    rest = list(S[:j]) + list(S[j + 1:])
    if z in rest:
        raise HoteqError(f"{z} is already occupied")
    insort(rest, z)
    return tuple(rest)
