"""Approximate equilibria when both voters and candidates are continuous.

The voter density is piecewise linear and bounded by ``M``.  Candidates are
restricted to a grid of step ``alpha = eps / (4 M)``; an ``eps``-equilibrium
of the continuous game survives on the grid as a ``2 eps``-equilibrium, so the
finite-set dynamic program (run with continuous deviation suprema) either
returns a ``4 eps``-equilibrium or certifies that no ``eps``-equilibrium
exists.  The quantile profile is the fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .core import NEG_INF, POS_INF, HoteqError, Instance, Interval, as_rational, cut_bracket, make_profile, mu
from .dp import ContinuousEvaluator, dp_solve
from .utility import utilities

DEFAULT_FLOOR_EXP = 20
DEFAULT_MAX_GRID_POINTS = 513


def _require_density(instance: Instance):
    if instance.voters.kind != "density":
        raise HoteqError("continuous pipeline needs nonatomic (density-only) voters")
    if not isinstance(instance.space, Interval):
        raise HoteqError("continuous pipeline needs an interval candidate space")


def quantile_profile(instance: Instance) -> tuple:
    """Candidates at the ``i/(m+1)`` mass quantiles.

    Irrational quantiles are replaced by the upper end of a ``2**-60`` bracket.
    """
    _require_density(instance)
    voters, m = instance.voters, instance.m
    W = voters.total
    out = []
    for i in range(1, m + 1):
        _, hi, _ = cut_bracket(Fraction(0), i * W / (m + 1), voters, instance.R)
        if out and hi <= out[-1]:
            hi = out[-1] + Fraction(1, 2**60)
        out.append(hi)
    return make_profile(out, instance)


class AlphaGrid(NamedTuple):
    alpha: Fraction
    points: tuple


def alpha_grid(instance: Instance, eps) -> AlphaGrid:
    """Grid ``0, alpha, ..., R`` with ``alpha = eps/(4M)`` shrunk to divide ``R``."""
    eps = as_rational(eps)
    if eps <= 0:
        raise HoteqError("eps must be positive")
    if instance.M is None:
        raise HoteqError("the grid needs a density bound M")
    R = instance.R
    a0 = eps / (4 * instance.M)
    count = math.ceil(R / a0)
    alpha = R / count
    return AlphaGrid(alpha, tuple(k * alpha for k in range(count + 1)))


@dataclass(frozen=True)
class ApproxResult:
    """A profile with the guarantee its construction path certifies.

    ``guarantee`` is ``"quantile"`` (a ``W/(m+1)``-equilibrium), ``"grid"``
    (a ``4 eps``-equilibrium, ``eps`` in ``params``) or ``"bracket"``
    (``params = (eps_low, eps_high)``: a ``4 eps_high``-equilibrium, and no
    ``eps_low``-equilibrium exists unless ``eps_low`` is None).
    """

    profile: tuple
    guarantee: str
    params: tuple = ()

    @property
    def slack(self) -> Fraction | None:
        if self.guarantee == "grid":
            return 4 * self.params[0]
        if self.guarantee == "bracket":
            return 4 * self.params[1]
        return None


def _grid_dp(instance: Instance, eps, max_grid_points):
    grid = alpha_grid(instance, eps)
    if max_grid_points is not None and len(grid.points) > max_grid_points:
        raise HoteqError(f"grid of {len(grid.points)} points exceeds {max_grid_points}")
    ev = ContinuousEvaluator(instance.voters)
    return dp_solve(instance, eps=2 * eps, evaluator=ev, positions=grid.points)


def solve_cc(instance: Instance, eps=None, floor=None,
             max_grid_points: int | None = DEFAULT_MAX_GRID_POINTS) -> ApproxResult:
    _require_density(instance)
    W, m = instance.total, instance.m
    if eps is not None:
        eps = as_rational(eps)
        if eps <= 0:
            raise HoteqError("eps must be positive")
        if eps >= W / (4 * m):
            return ApproxResult(quantile_profile(instance), "quantile", (W / (m + 1),))
        prof = _grid_dp(instance, eps, max_grid_points)
        if prof is None:
            return ApproxResult(quantile_profile(instance), "quantile", (W / (m + 1),))
        return ApproxResult(prof, "grid", (eps,))

    floor = W / 2**DEFAULT_FLOOR_EXP if floor is None else as_rational(floor)
    eps = W / (8 * m)
    best = None
    low = None
    while eps >= floor:
        if max_grid_points is not None and len(alpha_grid(instance, eps).points) > max_grid_points:
            break
        prof = _grid_dp(instance, eps, None)
        if prof is None:
            low = eps
            break
        best = (prof, eps)
        eps /= 2
    if best is None:
        return ApproxResult(quantile_profile(instance), "quantile", (W / (m + 1),))
    return ApproxResult(best[0], "bracket", (low, best[1]))


# -- classical sufficient conditions -------------------------------------------


class ELConditions(NamedTuple):
    c1: bool
    c2: bool
    c3: bool
    c4: bool


def one_sided(S, voters) -> list:
    """``(left, right)`` vote masses of each candidate, own position excluded."""
    out = []
    ext = (NEG_INF,) + tuple(S) + (POS_INF,)
    for j in range(1, len(ext) - 1):
        s = ext[j]
        left = voters.cdf(s) - voters.cdf(mu(ext[j - 1], s))
        right = voters.cdf(mu(s, ext[j + 1])) - voters.cdf(s)
        out.append((left, right))
    return out


def el_conditions(profile, instance: Instance, delta) -> ELConditions:
    """The four classical sufficient conditions, with pair distance ``delta``."""
    if instance.voters.kind != "density":
        raise HoteqError("the conditions need a voter density")
    delta = as_rational(delta)
    if delta <= 0:
        raise HoteqError("delta must be positive")
    S = make_profile(profile, instance)
    voters, R, m = instance.voters, instance.R, len(S)
    f = voters.density_at
    us = utilities(S, voters)
    sides = one_sided(S, voters)
    c1 = min(us) >= max(max(l, r) for l, r in sides)

    pair_right = [j + 1 < m and S[j + 1] - S[j] == delta for j in range(m)]
    paired = [pair_right[j] or (j > 0 and pair_right[j - 1]) for j in range(m)]
    c2 = m >= 2 and pair_right[0] and pair_right[m - 2]

    c3 = all(
        f(mu(S[j - 1], S[j])) == f(mu(S[j], S[j + 1]))
        for j in range(1, m - 1) if not paired[j]
    )

    c4 = True
    for j in range(m - 1):
        if not pair_right[j]:
            continue
        outer_l = max(mu(S[j - 1], S[j]), Fraction(0)) if j > 0 else Fraction(0)
        outer_r = min(mu(S[j + 1], S[j + 2]), R) if j + 2 < m else R
        if f(mu(S[j], S[j + 1])) < max(f(outer_l), f(outer_r)):
            c4 = False
    return ELConditions(c1, c2, c3, c4)
