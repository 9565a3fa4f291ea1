"""Equilibrium verification, the brute-force oracle, and the lower-bit check.

Two independent routes decide whether a profile is an equilibrium:
:func:`is_eps_equilibrium` uses the gap characterisation (every candidate is
an (eps-)best response inside its own gap, and the weakest candidate beats the
best entry anywhere), while :func:`is_equilibrium_direct` relocates each
candidate to every relevant alternative position and recomputes the whole
profile's utilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

from .core import (NEG_INF, POS_INF, FiniteSet, HoteqError, Instance, Interval,
                   as_rational, make_profile, render)
from .deviation import gap_sup_atomic, gap_sup_density
from .dyadic import bit_level, bit_points
from .utility import move, util, utilities, window_utility

BRUTE_FORCE_LIMIT = 10**6


@dataclass(frozen=True)
class Deviation:
    candidate: int  # 1-based
    position: Fraction
    piece: tuple | None
    gain: Fraction

    def as_dict(self) -> dict:
        return {
            "candidate": self.candidate,
            "position": render(self.position),
            "piece": None if self.piece is None else [render(x) for x in self.piece],
            "gain": render(self.gain),
        }


@dataclass
class VerificationReport:
    is_equilibrium: bool
    per_candidate_utilities: list
    prop1_minu: Fraction
    prop1_maxd: Fraction
    failing_candidate: int | None = None
    improving_deviation: Deviation | None = None
    gap_values: list = field(default_factory=list)

    def __bool__(self):
        return self.is_equilibrium


@dataclass(frozen=True)
class _GapBest:
    sup: Fraction
    point: Fraction | None  # a concrete best position, or the limit point
    piece: tuple | None
    attained: bool


def _gap_best(instance: Instance, p, q) -> _GapBest:
    voters, space = instance.voters, instance.space
    if isinstance(space, FiniteSet):
        best, arg = Fraction(0), None
        for z in space.positions:
            if p < z < q:
                v = window_utility(p, z, q, voters).total
                if arg is None or v > best:
                    best, arg = v, z
        return _GapBest(best, arg, None if arg is None else (arg, arg), arg is not None)
    if voters.kind == "atoms":
        rep = gap_sup_atomic(p, q, voters, bounds=(Fraction(0), space.R))
        return _GapBest(rep.sup, rep.representative(), rep.attaining, rep.attaining is not None)
    if voters.kind == "density":
        rep = gap_sup_density(p, q, voters)
        return _GapBest(rep.sup, rep.attaining[0], rep.attaining, rep.attained)
    raise HoteqError("verification over an interval does not support mixed voters")


def _realize(instance, S, j, gap: _GapBest, p, q, threshold):
    """A concrete position in ``(p, q)`` whose replayed utility beats ``threshold``."""
    if gap.attained:
        return gap.point
    L = gap.point
    lo = max(p, Fraction(0)) if p == NEG_INF else p
    hi = min(q, instance.R) if q == POS_INF else q
    toward_left = L == q or L == hi
    h = (hi - lo) / 2
    for _ in range(400):
        z = L - h if toward_left else L + h
        if z not in S and util(z, move(S, j, z), instance.voters).total > threshold:
            return z
        h /= 2
    raise HoteqError("could not realise the supremum by a concrete deviation")


def is_eps_equilibrium(S, instance: Instance, eps=0) -> VerificationReport:
    eps = as_rational(eps)
    if eps < 0:
        raise HoteqError("eps must be nonnegative")
    S = make_profile(S, instance)
    voters = instance.voters
    m = len(S)
    ext = (NEG_INF,) + S + (POS_INF,)
    us = utilities(S, voters)
    inner = [_gap_best(instance, ext[j], ext[j + 2]) for j in range(m)]
    gaps = [_gap_best(instance, ext[k], ext[k + 1]) for k in range(m + 1)]
    minu = min(us)
    maxd = max(g.sup for g in gaps)
    report = VerificationReport(True, us, minu, maxd, gap_values=[g.sup for g in gaps])
    for j in range(m):
        if us[j] < inner[j].sup - eps:
            p, q = ext[j], ext[j + 2]
            z = _realize(instance, S, j, inner[j], p, q, us[j] + eps)
            _fail(report, S, j, z, inner[j].piece, voters)
            return report
    if minu < maxd - eps:
        j = us.index(minu)
        k = next(k for k, g in enumerate(gaps) if g.sup == maxd)
        z = _realize(instance, S, j, gaps[k], ext[k], ext[k + 1], minu + eps)
        _fail(report, S, j, z, gaps[k].piece, voters)
    return report


def _fail(report, S, j, z, piece, voters):
    gain = util(z, move(S, j, z), voters).total - report.per_candidate_utilities[j]
    report.is_equilibrium = False
    report.failing_candidate = j + 1
    report.improving_deviation = Deviation(j + 1, z, piece, gain)


def is_equilibrium(S, instance: Instance) -> VerificationReport:
    return is_eps_equilibrium(S, instance, 0)


def best_response(S, instance: Instance, j: int) -> Deviation:
    """Best relocation of candidate ``j`` (1-based) anywhere in the space.

    When the best value is a supremum that is only approached, the reported
    position is a concrete point capturing at least 999/1000 of the possible
    gain.  ``gain`` is always the replayed gain at the reported position.
    """
    S = make_profile(S, instance)
    if not 1 <= j <= len(S):
        raise HoteqError(f"candidate index {j} out of range")
    u = utilities(S, instance.voters)[j - 1]
    rest = S[:j - 1] + S[j:]
    ext = (NEG_INF,) + rest + (POS_INF,)
    best, where = None, None
    for k in range(len(ext) - 1):
        g = _gap_best(instance, ext[k], ext[k + 1])
        if g.point is not None and (best is None or g.sup > best.sup):
            best, where = g, (ext[k], ext[k + 1])
    if best is None or best.sup <= u:
        return Deviation(j, S[j - 1], None, Fraction(0))
    target = u + (best.sup - u) * Fraction(999, 1000)
    z = _realize(instance, S, j - 1, best, where[0], where[1], target)
    gain = util(z, move(S, j - 1, z), instance.voters).total - u
    return Deviation(j, z, best.piece, gain)


# -- definition path -----------------------------------------------------------


def _alternatives(S, j, instance) -> list:
    """Positions covering every constancy piece of candidate ``j``'s payoff."""
    rest = S[:j] + S[j + 1:]
    space = instance.space
    if isinstance(space, FiniteSet):
        return [z for z in space.positions if z not in rest]
    voters = instance.voters
    crit = {Fraction(0), space.R, *rest}
    for x in voters.knots():
        crit.add(x)
        for s in rest:
            crit.add(2 * x - s)
    crit = sorted(c for c in crit if 0 <= c <= space.R)
    pts = [c for c in crit if c not in rest]
    pts += [(a + b) / 2 for a, b in zip(crit, crit[1:])]
    return pts


def _density_region_sup(f, lo, hi):
    """Supremum over ``(lo, hi)`` of a quadratic known from interior samples."""
    w = hi - lo
    x1, x2, x3 = lo + w / 4, lo + w / 2, lo + 3 * w / 4
    y1, y2, y3 = f(x1), f(x2), f(x3)
    # Newton form through the three samples
    d1 = (y2 - y1) / (x2 - x1)
    d2 = ((y3 - y2) / (x3 - x2) - d1) / (x3 - x1)

    def poly(x):
        return y1 + d1 * (x - x1) + d2 * (x - x1) * (x - x2)

    vals = [poly(lo), poly(hi), y2]
    if d2 < 0:
        # vertex of y1 + d1 (x-x1) + d2 (x-x1)(x-x2)
        xv = (x1 + x2) / 2 - d1 / (2 * d2)
        if lo < xv < hi:
            vals.append(poly(xv))
    return max(vals)


def is_equilibrium_direct(S, instance: Instance, eps=0) -> tuple:
    """Definition check: ``(is_eps_equilibrium, utilities, best_alternatives)``."""
    eps = as_rational(eps)
    S = make_profile(S, instance)
    voters = instance.voters
    us = utilities(S, voters)
    best = []
    ok = True
    for j in range(len(S)):
        def payoff(z, j=j):
            return util(z, move(S, j, z), voters).total

        if voters.kind == "density" and isinstance(instance.space, Interval):
            rest = S[:j] + S[j + 1:]
            crit = {Fraction(0), instance.R, *rest}
            for x in voters.knots():
                for s in rest:
                    crit.add(2 * x - s)
            crit = sorted(c for c in crit if 0 <= c <= instance.R)
            top = max(_density_region_sup(payoff, a, b) for a, b in zip(crit, crit[1:]))
        else:
            alts = _alternatives(S, j, instance)
            top = max((payoff(z) for z in alts), default=us[j])
        best.append(top)
        if top > us[j] + eps:
            ok = False
    return ok, us, best


# -- oracle ----------------------------------------------------------------


def brute_force_solve(instance: Instance, limit: int = BRUTE_FORCE_LIMIT, positions=None) -> set:
    """Every equilibrium placing candidates on the given positions.

    ``positions`` defaults to the finite candidate set; an explicit list may
    be passed for interval spaces, where deviations are still continuous.
    """
    if positions is None:
        if not isinstance(instance.space, FiniteSet):
            raise HoteqError("brute force needs a finite candidate set or explicit positions")
        positions = instance.space.positions
    positions = sorted(as_rational(p) for p in positions)
    if comb(len(positions), instance.m) > limit:
        raise HoteqError(f"more than {limit} placements to enumerate")
    found = set()
    for S in combinations(positions, instance.m):
        if is_equilibrium_direct(S, instance)[0]:
            found.add(tuple(S))
    return found


def lower_bit_check(S, instance: Instance) -> bool:
    """True iff every order-preserving move to a lower dyadic level breaks equilibrium."""
    S = make_profile(S, instance)
    R = instance.R
    for i, s in enumerate(S):
        level = bit_level(s)
        if level is None:
            raise HoteqError(f"position {render(s)} is not dyadic")
        if level == 0:
            continue
        lo = S[i - 1] if i > 0 else Fraction(0)
        hi = S[i + 1] if i + 1 < len(S) else R
        for z in bit_points(level - 1, lo, hi, closed=True):
            if (i > 0 and z <= lo) or (i + 1 < len(S) and z >= hi):
                continue
            if is_equilibrium(S[:i] + (z,) + S[i + 1:], instance).is_equilibrium:
                return False
    return True
