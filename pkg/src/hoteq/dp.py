"""Equilibrium search over a finite set of candidate positions.

The table ``T(i, s_{i-1}, s_i, s_{i+1}, minu, maxd)`` is decided through the
set of Pareto-optimal ``(min utility, max deviation)`` pairs reachable by a
valid suffix ``s_{i+2} < ... < s_m``.  An entry is feasible exactly when
``minu``/``maxd`` are ordered and some frontier pair meets both bounds, so one
frontier per position triple answers every ``(minu, maxd)`` query.
:meth:`DPSolver.entry_feasible_table` fills entries the long way, by the
recursion over ``V x V`` successors, and is kept as a cross-check.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .core import NEG_INF, POS_INF, FiniteSet, HoteqError, Instance, as_rational
from .deviation import gap_sup
from .utility import window_utility


class DPKey(NamedTuple):
    i: int
    left: object
    mid: Fraction
    right: object
    minu: Fraction
    maxd: Fraction


# -- utility values ----------------------------------------------------------


def utility_value_set(instance: Instance, safe: bool = False) -> list:
    """Every utility a candidate (or entrant) can receive, plus 0 and the total.

    Atom-only voters use the four interval variants per pair of atom
    positions.  Otherwise, or with ``safe``, every ``util(b, {a, b, c})`` over
    triples of candidate positions (ends extended by the sentinels) is listed.
    """
    voters = instance.voters
    values = {Fraction(0), voters.total}
    if voters.kind == "atoms" and not safe:
        pos = voters.atom_positions
        for x, p in enumerate(pos):
            for q in pos[x:]:
                full = voters.mass(p, q)
                hp, hq = voters.atom_at(p) / 2, voters.atom_at(q) / 2
                values.update((full, full - hp, full - hq, full - hp - hq))
        return sorted(values)
    if not isinstance(instance.space, FiniteSet):
        raise HoteqError("utility value set needs atoms or a finite candidate set")
    pts = instance.space.positions
    ext = (NEG_INF,) + pts + (POS_INF,)
    for bi, b in enumerate(pts, start=1):
        for a in ext[:bi]:
            for c in ext[bi + 1:]:
                values.add(window_utility(a, b, c, voters).total)
    return sorted(values)


# -- deviation evaluators ----------------------------------------------------


class FiniteSetEvaluator:
    """Best entrant utility over the grid points strictly inside a gap."""

    def __init__(self, positions, voters):
        self.positions = tuple(positions)
        self.voters = voters
        self._cache = {}

    def best(self, p, q):
        key = (p, q)
        hit = self._cache.get(key)
        if hit is None:
            best_val, best_z = Fraction(0), None
            for z in self.positions:
                if p < z < q:
                    v = window_utility(p, z, q, self.voters).total
                    if best_z is None or v > best_val:
                        best_val, best_z = v, z
            hit = self._cache[key] = (best_val, best_z)
        return hit

    def intu(self, p, q) -> Fraction:
        return self.best(p, q)[0]

    def in_intr(self, p, z, q) -> bool:
        return window_utility(p, z, q, self.voters).total == self.intu(p, q)


class ContinuousEvaluator:
    """Open-piece supremum of the entrant utility anywhere in the gap."""

    def __init__(self, voters):
        self.voters = voters
        self._cache = {}

    def report(self, p, q):
        key = (p, q)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = gap_sup(p, q, self.voters)
        return hit

    def intu(self, p, q) -> Fraction:
        return self.report(p, q).sup

    def in_intr(self, p, z, q) -> bool:
        return window_utility(p, z, q, self.voters).total >= self.intu(p, q)


# -- the table ---------------------------------------------------------------


class DPSolver:
    def __init__(self, positions, m: int, voters, evaluator, eps=None):
        self.positions = tuple(sorted(as_rational(p) for p in positions))
        if m > len(self.positions):
            raise HoteqError("m exceeds the number of candidate positions")
        self.m = m
        self.voters = voters
        self.evaluator = evaluator
        self.eps = None if eps is None else as_rational(eps)
        self.slack = Fraction(0) if eps is None else self.eps
        self._index = {p: k for k, p in enumerate(self.positions)}
        self._frontier = {}
        self._util = {}
        self._table = {}
        self._values = None

    # positions are indexed; -1 and n stand for the sentinels
    def _pos(self, k):
        if k < 0:
            return NEG_INF
        if k >= len(self.positions):
            return POS_INF
        return self.positions[k]

    def _idx(self, x):
        if x == NEG_INF:
            return -1
        if x == POS_INF:
            return len(self.positions)
        try:
            return self._index[x]
        except KeyError:
            raise HoteqError(f"{x} is not a candidate position") from None

    def util3(self, a, b, c) -> Fraction:
        key = (a, b, c)
        u = self._util.get(key)
        if u is None:
            u = self._util[key] = window_utility(
                self._pos(a), self._pos(b), self._pos(c), self.voters).total
        return u

    def intu(self, a, c) -> Fraction:
        return self.evaluator.intu(self._pos(a), self._pos(c))

    def frontier(self, i: int, a: int, b: int, c: int) -> list:
        """Pareto-optimal ``(minu, maxd, successor)`` over valid suffixes."""
        key = (i, a, b, c)
        hit = self._frontier.get(key)
        if hit is not None:
            return hit
        n = len(self.positions)
        out = []
        last = i == self.m
        if last != (c == n) or not a < b < c:
            self._frontier[key] = out
            return out
        u = self.util3(a, b, c)
        if u >= self.intu(a, c) - self.slack:
            d = max(self.intu(a, b), self.intu(b, c))
            if last:
                out = [(u, d, None)]
            else:
                cands = []
                succ = [n] if i + 1 == self.m else range(c + 1, n)
                for e in succ:
                    if e < n and n - e < self.m - i - 1:
                        break
                    for k, (u2, d2, _) in enumerate(self.frontier(i + 1, b, c, e)):
                        cands.append((min(u, u2), max(d, d2), (e, k)))
                out = _pareto(cands)
        self._frontier[key] = out
        return out

    def _ordered(self, minu, maxd) -> bool:
        return minu >= maxd - self.slack

    def entry_feasible(self, key: DPKey):
        """``(feasible, witness)`` with witness ``(s_{i+2}, minu', maxd')``."""
        i, a, b, c = key.i, self._idx(key.left), self._idx(key.mid), self._idx(key.right)
        minu, maxd = as_rational(key.minu), as_rational(key.maxd)
        if not (1 <= i <= self.m) or not self._ordered(minu, maxd):
            return False, None
        for u, d, succ in self.frontier(i, a, b, c):
            if u >= minu and d <= maxd:
                if succ is None:
                    return True, None
                return True, (self._pos(succ[0]), minu, maxd)
        return False, None

    def values(self) -> list:
        if self._values is None:
            inst = Instance(FiniteSet(self.positions), self.voters, self.m)
            self._values = utility_value_set(inst)
        return self._values

    def entry_feasible_table(self, key: DPKey) -> bool:
        """Literal table recursion: successors enumerated over ``V x V``."""
        t = (key.i, self._idx(key.left), self._idx(key.mid), self._idx(key.right),
             as_rational(key.minu), as_rational(key.maxd))
        return self._table_entry(*t)

    def _table_entry(self, i, a, b, c, minu, maxd) -> bool:
        key = (i, a, b, c, minu, maxd)
        hit = self._table.get(key)
        if hit is not None:
            return hit
        n = len(self.positions)
        ok = False
        eps = self.slack
        if a < b < c and (i == self.m) == (c == n) and minu >= maxd - eps:
            u = self.util3(a, b, c)
            c1 = (u >= self.intu(a, c) - eps and u >= minu
                  and maxd >= max(self.intu(a, b), self.intu(b, c)))
            if c1 and i == self.m:
                ok = True
            elif c1:
                V = self.values()
                succ = [n] if i + 1 == self.m else range(c + 1, n)
                ok = any(
                    self._table_entry(i + 1, b, c, e, mu2, md2)
                    for e in succ
                    for mu2 in V if mu2 >= minu
                    for md2 in V if md2 - eps <= maxd - eps and mu2 >= md2 - eps
                )
        self._table[key] = ok
        return ok

    def roots(self):
        """Root states ``(1, -inf, s_1, s_2)`` in lexicographic order."""
        n = len(self.positions)
        for b in range(n):
            if self.m == 1:
                yield -1, b, n
                continue
            for c in range(b + 1, n):
                yield -1, b, c

    def solve(self):
        for a, b, c in self.roots():
            pts = [p for p in self.frontier(1, a, b, c) if self._ordered(p[0], p[1])]
            if pts:
                return self._rebuild(a, b, c, pts[0])
        return None

    def decide_table(self) -> bool:
        V = self.values()
        return any(
            self._table_entry(1, a, b, c, mu_, md_)
            for a, b, c in self.roots() for mu_ in V for md_ in V
        )

    def _rebuild(self, a, b, c, point):
        profile = [self.positions[b]]
        i = 1
        while point[2] is not None:
            e, k = point[2]
            point = self.frontier(i + 1, b, c, e)[k]
            profile.append(self.positions[c])
            a, b, c, i = b, c, e, i + 1
        return tuple(profile)


def _pareto(cands: list) -> list:
    """Keep pairs not dominated by larger minu and smaller maxd."""
    cands.sort(key=lambda t: (-t[0], t[1]))
    out, best_d = [], None
    for t in cands:
        if best_d is None or t[1] < best_d:
            out.append(t)
            best_d = t[1]
    return out


def dp_solve(instance: Instance, eps=None, evaluator=None, positions=None, verify=True):
    """Return an equilibrium (an ``eps``-equilibrium when ``eps`` is given) or None."""
    if positions is None:
        if not isinstance(instance.space, FiniteSet):
            raise HoteqError("dp_solve needs a finite candidate set or explicit positions")
        positions = instance.space.positions
    if evaluator is None:
        evaluator = FiniteSetEvaluator(positions, instance.voters)
    solver = DPSolver(positions, instance.m, instance.voters, evaluator, eps)
    profile = solver.solve()
    if profile is not None and verify:
        from .verify import is_eps_equilibrium

        report = is_eps_equilibrium(profile, instance, solver.slack)
        if not report.is_equilibrium:
            raise HoteqError(f"dynamic program produced a non-equilibrium {profile}")
    return profile
