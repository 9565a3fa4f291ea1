"""Continuous candidate positions over integer voter atoms.

Reflections of candidates in voter positions are the barriers that bound how
far a candidate can slide without breaking an equilibrium.  This module holds
the boundary sets, the bit-lowering shift procedures that move any
equilibrium onto the dyadic grid of step ``2**-m``, the grid solver that this
justifies, and a family of instances whose equilibria need many bits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .core import FiniteSet, HoteqError, Instance, Interval, Voters, as_rational, make_profile
from .dp import ContinuousEvaluator, dp_solve
from .dyadic import bit_level, in_bit, next_in_bit
from .verify import is_equilibrium

GRID_LIMIT_ENV = "HOTEQ_GRID_LIMIT"
DEFAULT_GRID_LIMIT = 10**5


def reflect(x, p) -> Fraction:
    """Mirror image of ``x`` in ``p``."""
    return 2 * as_rational(p) - as_rational(x)


class ReflectionSets(NamedTuple):
    b: tuple
    b2: tuple


def _voter_positions(voters) -> tuple:
    if isinstance(voters, Voters):
        if voters.density_mass > 0:
            raise HoteqError("reflection sets need atom-only voters")
        return voters.atom_positions
    return tuple(sorted(as_rational(p) for p in voters))


def reflection_sets(x, voters) -> ReflectionSets:
    """Single reflections of ``x`` and same-direction double reflections.

    ``voters`` is a :class:`Voters` or a plain iterable of voter positions.
    """
    x = as_rational(x)
    pts = _voter_positions(voters)
    b, b2 = set(), set()
    for p in pts:
        r = 2 * p - x
        b.add(r)
        for q in pts:
            if (x < p and r < q) or (x > p and r > q):
                b2.add(2 * q - r)
    return ReflectionSets(tuple(sorted(b)), tuple(sorted(b2)))


# -- shifting -----------------------------------------------------------------


@dataclass(frozen=True)
class ShiftStep:
    kind: str  # "right" or "left"
    candidate: int  # 1-based
    old: Fraction
    new: Fraction
    iteration: int


@dataclass
class ShiftTrace:
    steps: list = field(default_factory=list)
    profiles: list = field(default_factory=list)  # profile after each verified step
    counts: list = field(default_factory=list)  # (i, #candidates in bit(i)) per iteration

    def __len__(self):
        return len(self.steps)

    def as_list(self) -> list:
        from .core import render

        return [
            {"kind": s.kind, "candidate": s.candidate, "old": render(s.old),
             "new": render(s.new), "iteration": s.iteration}
            for s in self.steps
        ]


class _Shifter:
    def __init__(self, S, instance):
        self.S = list(S)
        self.instance = instance
        self.pv = instance.voters.atom_positions
        self.trace = ShiftTrace()
        self._b2 = {}

    def b2(self, idx):
        """B² of the candidate at 0-based ``idx``; empty past the last one."""
        if idx >= len(self.S):
            return ()
        s = self.S[idx]
        hit = self._b2.get(s)
        if hit is None:
            hit = self._b2[s] = reflection_sets(s, self.pv).b2
        return hit

    def commit(self, moves, kind, i):
        """Apply ``[(idx, new)]`` as one step and re-verify the profile."""
        for idx, new in moves:
            self.trace.steps.append(ShiftStep(kind, idx + 1, self.S[idx], new, i))
            self.S[idx] = new
        t = len(self.trace.profiles) + 1
        try:
            S = make_profile(self.S, self.instance)
        except HoteqError:
            raise HoteqError(f"equilibrium broken at step {t}: order not preserved") from None
        if not is_equilibrium(S, self.instance).is_equilibrium:
            raise HoteqError(f"equilibrium broken at step {t}")
        self.trace.profiles.append(S)

    def shift_right(self):
        m = len(self.S)
        for i in range(1, m + 1):
            k = next((j for j, s in enumerate(self.S) if not in_bit(s, i - 1)), None)
            if k is None:
                return
            x = next_in_bit(self.S[k], i - 1, "right")
            eps = Fraction(1, 2**i)
            nxt = self.S[k + 1] if k + 1 < m else None
            if nxt is not None and self.S[k] <= nxt <= x - eps:
                self.commit([(k + 1, x - eps / 2), (k, x - eps)], "right", i)
            elif self.S[k] <= x - eps:
                if self.S[k] != x - eps:
                    self.commit([(k, x - eps)], "right", i)
            else:
                self.shift_left(k, x, eps, i)
            count = sum(in_bit(s, i) for s in self.S)
            self.trace.counts.append((i, count))
            if count < i:
                raise HoteqError(f"only {count} candidates in bit({i}) after iteration {i}")

    def shift_left(self, k, x, eps, i):
        m = len(self.S)
        j = k
        for _ in range(4 * m + 4):
            lo, hi = x - eps, self.S[j]
            near = [y for y in self.b2(j + 1) if lo <= y <= hi]
            far = [y for y in self.b2(j + 2) if lo <= y <= hi]
            if not near and not far:
                idx = j - 1 if j > 0 and self.S[j - 1] >= lo else j
                if self.S[idx] != lo:
                    self.commit([(idx, lo)], "left", i)
                return
            z = min(near + far)
            if z in near:
                x = next_in_bit(self.S[j + 1], i - 1, "right")
                j += 1
            else:
                x = next_in_bit(self.S[j + 2], i - 1, "right")
                j += 2
        raise HoteqError("shift-left did not terminate")


def _check_shift_instance(instance: Instance):
    if not isinstance(instance.space, Interval):
        raise HoteqError("shifting needs an interval candidate space")
    v = instance.voters
    if v.kind != "atoms":
        raise HoteqError("shifting needs atom-only voters")
    if any(p.denominator != 1 or p < 0 for p in v.atom_positions):
        raise HoteqError("shifting needs voters at nonnegative integers")


def shift_to_low_bits(S, instance: Instance) -> tuple:
    """Move an equilibrium onto ``bit(m)`` one verified step at a time.

    Returns ``(profile, trace)``.  Every intermediate profile in the trace has
    been checked to be an equilibrium.
    """
    _check_shift_instance(instance)
    S = make_profile(S, instance)
    if not is_equilibrium(S, instance).is_equilibrium:
        raise HoteqError("input not an equilibrium")
    sh = _Shifter(S, instance)
    sh.shift_right()
    out = tuple(sh.S)
    m = len(out)
    if not all(in_bit(s, m) for s in out):
        raise HoteqError(f"shift finished with positions outside bit({m})")
    return out, sh.trace


# -- grid solver ----------------------------------------------------------------


def grid_limit() -> int:
    raw = os.environ.get(GRID_LIMIT_ENV)
    if raw is None:
        return DEFAULT_GRID_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise HoteqError(f"{GRID_LIMIT_ENV} must be an integer, not {raw!r}") from None


def dyadic_grid(R, level: int, limit: int | None = None) -> tuple:
    R = as_rational(R)
    scale = 2**level
    count = R * scale
    if count.denominator != 1:
        raise HoteqError("R must be a multiple of the grid step")
    limit = grid_limit() if limit is None else limit
    if count + 1 > limit:
        raise HoteqError(f"grid of {count + 1} points exceeds the limit of {limit}")
    return tuple(Fraction(k, scale) for k in range(int(count) + 1))


def solve_grid(instance: Instance, limit: int | None = None):
    """Exact equilibrium for integer atoms on ``[0, R]``, or None if none exists.

    Candidates are placed on multiples of ``2**-m``; deviations are evaluated
    over the whole continuum.
    """
    _check_shift_instance(instance)
    grid = dyadic_grid(instance.R, instance.m, limit)
    ev = ContinuousEvaluator(instance.voters)
    return dp_solve(instance, evaluator=ev, positions=grid)


# -- hard family ----------------------------------------------------------------


def gen_hard(k: int) -> tuple:
    """Instance and equilibrium whose positions need ``k + 1`` bits.

    ``4k + 2`` unit voters sit at ``1..4k+2`` and there are ``3k + 2``
    candidates.
    """
    if not isinstance(k, int) or k < 1:
        raise HoteqError("k must be a positive integer")
    n, m = 4 * k + 2, 3 * k + 2
    pos = [None] * (m + 1)  # 1-based
    for l in range(1, k + 1):
        off = Fraction(1, 2 ** (k - l + 1))
        pos[3 * l - 2] = (4 * l - 2) - off
        pos[3 * l] = 4 * l - off
        pos[3 * l + 2] = (4 * l + 2) - off
    pos[2] = Fraction(2)
    pos[m - 1] = Fraction(n - 1)
    voters = Voters(tuple((Fraction(p), Fraction(1)) for p in range(1, n + 1)))
    instance = Instance(Interval(Fraction(n)), voters, m)
    return instance, make_profile(pos[1:], instance)


__all__ = [
    "reflect", "ReflectionSets", "reflection_sets", "ShiftStep", "ShiftTrace",
    "shift_to_low_bits", "solve_grid", "dyadic_grid", "grid_limit", "gen_hard",
    "bit_level", "next_in_bit",
]
