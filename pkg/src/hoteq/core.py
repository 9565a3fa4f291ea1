"""Exact scalars, voter models and the instance data model.

Every position, weight and mass is a :class:`fractions.Fraction`.  The two
sentinel candidates at the ends of a profile are the floats ``-inf`` and
``+inf``; they only ever take part in comparisons and in :func:`mu`, never in
arithmetic that produces a stored value.
"""

from __future__ import annotations

import math
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
NEG_INF = -math.inf
POS_INF = math.inf
ExtendedPos = Union[Fraction, float]
Profile = tuple  # tuple[Fraction, ...], strictly increasing

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


class HoteqError(ValueError):
    """Invalid instance, profile or argument."""


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and rational strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise HoteqError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value, strict=False)
    raise HoteqError(f"not a rational: {value!r}")


def parse_rational(text: str, strict: bool = True) -> Fraction:
    """Parse ``"a/b"`` or ``"a"``.

    With ``strict`` the string must already be canonical: lowest terms and no
    ``/1`` suffix, which is what :func:`render` produces.
    """
    m = _RATIONAL_RE.match(text.strip())
    if not m:
        raise HoteqError(f"malformed rational {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return Fraction(num)
    den = int(m.group(2))
    if den == 0:
        raise HoteqError(f"zero denominator in {text!r}")
    value = Fraction(num, den)
    if strict and (value.numerator != num or value.denominator != den or den == 1):
        raise HoteqError(f"rational {text!r} is not in lowest terms")
    return value


def render(x: ExtendedPos) -> str:
    if isinstance(x, float):
        if x == POS_INF:
            return "+inf"
        if x == NEG_INF:
            return "-inf"
        raise HoteqError(f"float {x!r} is not an extended position")
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def mu(s: ExtendedPos, t: ExtendedPos) -> ExtendedPos:
    """Point where voters switch between candidates at ``s`` and ``t``."""
    if isinstance(s, float) or isinstance(t, float):
        if isinstance(s, float) and isinstance(t, float) and s != t:
            raise HoteqError("midpoint of -inf and +inf is undefined")
        return s if isinstance(s, float) else t
    return (s + t) / 2


@dataclass(frozen=True)
class Voters:
    """Voter atoms plus an optional piecewise-linear density.

    ``atoms`` is a sorted tuple of ``(position, weight)``; ``density`` is a
    sorted tuple of breakpoints ``(x, f(x))`` interpolated linearly and zero
    outside ``[x_first, x_last]``.
    """

    atoms: tuple = ()
    density: tuple = ()
    _apos: tuple = field(init=False, repr=False, compare=False)
    _acum: tuple = field(init=False, repr=False, compare=False)
    _dx: tuple = field(init=False, repr=False, compare=False)
    _dcum: tuple = field(init=False, repr=False, compare=False)
    _dmemo: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple((as_rational(p), as_rational(w)) for p, w in self.atoms)
        dens = tuple((as_rational(x), as_rational(f)) for x, f in self.density)
        for (p, _), (q, _) in zip(atoms, atoms[1:]):
            if not p < q:
                raise HoteqError("atom positions must be strictly increasing")
        if any(w <= 0 for _, w in atoms):
            raise HoteqError("atom weights must be positive")
        if len(dens) == 1:
            raise HoteqError("a density needs at least two breakpoints")
        for (x, _), (y, _) in zip(dens, dens[1:]):
            if not x < y:
                raise HoteqError("density breakpoints must be strictly increasing")
        if any(f < 0 for _, f in dens):
            raise HoteqError("density values must be nonnegative")
        acum = [Fraction(0)]
        for _, w in atoms:
            acum.append(acum[-1] + w)
        dcum = [Fraction(0)]
        for (x0, f0), (x1, f1) in zip(dens, dens[1:]):
            dcum.append(dcum[-1] + (x1 - x0) * (f0 + f1) / 2)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", dens)
        object.__setattr__(self, "_apos", tuple(p for p, _ in atoms))
        object.__setattr__(self, "_acum", tuple(acum))
        object.__setattr__(self, "_dx", tuple(x for x, _ in dens))
        object.__setattr__(self, "_dcum", tuple(dcum))
        object.__setattr__(self, "_dmemo", {})
        if self.total <= 0:
            raise HoteqError("total voter mass must be positive")

    @property
    def kind(self) -> str:
        if self.atoms and self.density_mass > 0:
            return "mixed"
        if self.atoms:
            return "atoms"
        return "density"

    @property
    def atom_mass(self) -> Fraction:
        return self._acum[-1]

    @property
    def density_mass(self) -> Fraction:
        return self._dcum[-1]

    @property
    def total(self) -> Fraction:
        return self.atom_mass + self.density_mass

    @property
    def atom_positions(self) -> tuple:
        return self._apos

    def support(self) -> tuple:
        """Smallest closed interval holding every voter."""
        pts = list(self._apos) + list(self._dx)
        return min(pts), max(pts)

    def knots(self) -> tuple:
        return tuple(sorted(set(self._apos) | set(self._dx)))

    def atom_at(self, z: ExtendedPos) -> Fraction:
        if isinstance(z, float):
            return Fraction(0)
        i = bisect_left(self._apos, z)
        if i < len(self._apos) and self._apos[i] == z:
            return self.atoms[i][1]
        return Fraction(0)

    def density_at(self, x: ExtendedPos) -> Fraction:
        """Value of the density at ``x``; right-continuous at the support ends."""
        dx = self._dx
        if not dx or isinstance(x, float) or x < dx[0] or x > dx[-1]:
            return Fraction(0)
        i = bisect_right(dx, x) - 1
        if i >= len(dx) - 1:
            return self.density[-1][1]
        (x0, f0), (x1, f1) = self.density[i], self.density[i + 1]
        return f0 + (f1 - f0) * (x - x0) / (x1 - x0)

    def density_cdf(self, z: ExtendedPos) -> Fraction:
        dx = self._dx
        if not dx or z <= dx[0]:
            return Fraction(0)
        if z >= dx[-1]:
            return self._dcum[-1]
        hit = self._dmemo.get(z)
        if hit is None:
            if len(self._dmemo) > 200_000:
                self._dmemo.clear()
            hit = self._dmemo[z] = self._density_cdf(z)
        return hit

    def _density_cdf(self, z: Fraction) -> Fraction:
        dx = self._dx
        i = bisect_right(dx, z) - 1
        (x0, f0), (x1, f1) = self.density[i], self.density[i + 1]
        t = z - x0
        slope = (f1 - f0) / (x1 - x0)
        return self._dcum[i] + f0 * t + slope * t * t / 2

    def cdf(self, z: ExtendedPos) -> Fraction:
        """Mass in ``(-inf, z]``."""
        if z == NEG_INF:
            return Fraction(0)
        if z == POS_INF:
            return self.total
        return self._acum[bisect_right(self._apos, z)] + self.density_cdf(z)

    def cdf_left(self, z: ExtendedPos) -> Fraction:
        """Mass in ``(-inf, z)``."""
        if z == NEG_INF:
            return Fraction(0)
        if z == POS_INF:
            return self.total
        return self._acum[bisect_left(self._apos, z)] + self.density_cdf(z)

    def mass(self, a: ExtendedPos, b: ExtendedPos) -> Fraction:
        """Mass in the closed interval ``[a, b]``."""
        if a > b:
            raise HoteqError("mass needs a <= b")
        return self.cdf(b) - self.cdf_left(a)


def mass(a: ExtendedPos, b: ExtendedPos, voters: Voters) -> Fraction:
    return voters.mass(a, b)


def cdf(z, voters: Voters) -> Fraction:
    return voters.cdf(as_rational(z))


# -- candidate spaces and instances ------------------------------------------


@dataclass(frozen=True)
class FiniteSet:
    positions: tuple

    def __post_init__(self):
        pts = tuple(as_rational(p) for p in self.positions)
        if not pts:
            raise HoteqError("finite candidate set is empty")
        for a, b in zip(pts, pts[1:]):
            if not a < b:
                raise HoteqError("candidate positions must be strictly increasing")
        object.__setattr__(self, "positions", pts)

    @property
    def lo(self) -> Fraction:
        return self.positions[0]

    @property
    def hi(self) -> Fraction:
        return self.positions[-1]

    def __contains__(self, x) -> bool:
        i = bisect_left(self.positions, x)
        return i < len(self.positions) and self.positions[i] == x


@dataclass(frozen=True)
class Interval:
    R: Fraction

    def __post_init__(self):
        R = as_rational(self.R)
        if R <= 0:
            raise HoteqError("interval length R must be positive")
        object.__setattr__(self, "R", R)

    @property
    def lo(self) -> Fraction:
        return Fraction(0)

    @property
    def hi(self) -> Fraction:
        return self.R

    def __contains__(self, x) -> bool:
        return not isinstance(x, float) and 0 <= x <= self.R


@dataclass(frozen=True)
class Instance:
    space: object
    voters: Voters
    m: int
    M: Fraction | None = None

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise HoteqError("m must be a positive integer")
        if isinstance(self.space, FiniteSet) and self.m > len(self.space.positions):
            raise HoteqError("m exceeds the number of candidate positions")
        lo, hi = self.voters.support()
        if lo < self.space.lo or hi > self.space.hi:
            raise HoteqError("voter support must lie inside the candidate space")
        if self.M is not None:
            M = as_rational(self.M)
            if M <= 0:
                raise HoteqError("density bound M must be positive")
            if any(f > M for _, f in self.voters.density):
                raise HoteqError("density exceeds the declared bound M")
            object.__setattr__(self, "M", M)

    @property
    def R(self) -> Fraction:
        return self.space.hi

    @property
    def total(self) -> Fraction:
        return self.voters.total

    def density_bound(self) -> Fraction:
        """Declared ``M`` or, failing that, the largest breakpoint value."""
        if self.M is not None:
            return self.M
        fmax = max((f for _, f in self.voters.density), default=Fraction(0))
        if fmax <= 0:
            raise HoteqError("instance has no density bound")
        return fmax


def make_profile(positions: Iterable, instance: Instance | None = None) -> Profile:
    pts = tuple(as_rational(p) for p in positions)
    for a, b in zip(pts, pts[1:]):
        if not a < b:
            raise HoteqError("profile positions must be strictly increasing")
    if instance is not None:
        if len(pts) != instance.m:
            raise HoteqError(f"profile has {len(pts)} positions, instance has m={instance.m}")
        for p in pts:
            if p not in instance.space:
                raise HoteqError(f"position {render(p)} is outside the candidate space")
    return pts


def neighbours(S: Sequence, j: int) -> tuple:
    """Left and right neighbours of ``S[j]``, with sentinels at the ends."""
    left = S[j - 1] if j > 0 else NEG_INF
    right = S[j + 1] if j + 1 < len(S) else POS_INF
    return left, right


# -- inverse cdf ---------------------------------------------------------------

CUT_PRECISION = 60


def _sqrt_bracket(D: Fraction, bits: int) -> tuple:
    """Exact sqrt of ``D`` when rational, else a bracket of width 2**-bits."""
    n, d = D.numerator, D.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        r = Fraction(rn, rd)
        return r, r
    scale = 1 << bits
    lo = Fraction(math.isqrt(n * d * scale * scale), d * scale)
    return lo, lo + Fraction(1, scale)


def _solve_piece(f0: Fraction, slope: Fraction, target: Fraction, bits: int) -> tuple:
    """Smallest t >= 0 with f0*t + slope*t**2/2 == target, as (lo, hi)."""
    if slope == 0:
        t = target / f0
        return t, t
    # t = 2T / (f0 + sqrt(f0^2 + 2 s T)): stable for either sign of the slope
    D = f0 * f0 + 2 * slope * target
    k = bits
    while True:
        rlo, rhi = _sqrt_bracket(D, k)
        lo, hi = 2 * target / (f0 + rhi), 2 * target / (f0 + rlo)
        if hi - lo <= Fraction(1, 1 << bits):
            return lo, hi
        k += 8


def cut_bracket(z, v, voters: Voters, R=None, bits: int = CUT_PRECISION) -> tuple:
    """Smallest ``y >= z`` with ``cdf(y) - cdf(z) >= v``.

    Returns ``(lo, hi, exact)``.  When the root is rational ``lo == hi`` and
    ``exact`` is true; otherwise the root lies in ``[lo, hi]`` with
    ``hi - lo <= 2**-bits``.  If no such ``y`` exists the result is ``R``
    (default: the right end of the voter support).
    """
    z, v = as_rational(z), as_rational(v)
    lo_s, hi_s = voters.support()
    R = hi_s if R is None else as_rational(R)
    if v < 0:
        raise HoteqError("cut needs a nonnegative mass")
    if z < 0 or z > R:
        raise HoteqError("cut position outside [0, R]")
    if v == 0:
        return z, z, True
    level = voters.cdf(z) + v
    if level > voters.total:
        return R, R, True
    knots = [k for k in voters.knots() if k > z]
    prev = z
    for k in knots:
        if voters.cdf(k) >= level:
            if voters.cdf_left(k) < level:
                # the atom at k closes the gap
                return k, k, True
            break
        prev = k
    else:  # pragma: no cover - level <= total guarantees a knot
        return R, R, True
    # root lies strictly inside (prev, k) where only the density acts
    need = level - voters.cdf(prev)
    f0 = voters.density_at(prev)
    f1 = voters.density_at(k)
    slope = (f1 - f0) / (k - prev)
    tlo, thi = _solve_piece(f0, slope, need, bits)
    return prev + tlo, prev + thi, tlo == thi


def cut(z, v, voters: Voters, R=None, bits: int = CUT_PRECISION) -> Fraction:
    """Quantile inversion; the upper bracket end when the root is irrational."""
    return cut_bracket(z, v, voters, R, bits)[1]
