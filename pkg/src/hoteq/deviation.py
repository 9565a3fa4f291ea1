"""Best entry into a gap between two occupied positions.

With atoms the entrant's vote share is a step function of its position; with
a piecewise-linear density it is piecewise quadratic.  Both are maximised
exactly, using suprema over open pieces so that "arbitrarily close to an
occupied point" is captured without ever placing two candidates together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import NEG_INF, POS_INF, ExtendedPos, HoteqError, Voters, render
from .utility import window_utility


@dataclass(frozen=True)
class DeviationReport:
    """Supremum of an entrant's utility over an open gap ``(p, q)``.

    ``attaining`` is an open interval ``(lo, hi)`` for atoms.  For densities
    it is a degenerate ``(z, z)``; ``attained`` is false when the supremum is
    only approached as ``z`` tends to that point.
    """

    sup: Fraction
    attaining: tuple
    pieces: tuple = ()
    attained: bool = True
    point_values: tuple = field(default=(), repr=False)

    def representative(self) -> Fraction | None:
        """A concrete position inside the attaining piece, if one is finite."""
        if self.attaining is None:
            return None
        lo, hi = self.attaining
        if lo == hi:
            return lo
        return _inner_point(lo, hi)

    def as_dict(self) -> dict:
        return {
            "sup": render(self.sup),
            "attaining": None if self.attaining is None else [render(x) for x in self.attaining],
            "attained": self.attained,
            "pieces": [
                {"lo": render(lo), "hi": render(hi), "value": render(v)}
                for (lo, hi), v in self.pieces
            ],
        }


def _inner_point(lo: ExtendedPos, hi: ExtendedPos):
    if lo == NEG_INF and hi == POS_INF:
        return Fraction(0)
    if lo == NEG_INF:
        return hi - 1
    if hi == POS_INF:
        return lo + 1
    return (lo + hi) / 2


def entrant_value(z: Fraction, p: ExtendedPos, q: ExtendedPos, voters: Voters) -> Fraction:
    """Votes of an entrant at ``z`` facing occupants at ``p < z < q``."""
    return window_utility(p, z, q, voters).total


def gap_sup_atomic(p: ExtendedPos, q: ExtendedPos, voters: Voters,
                   bounds: tuple | None = None) -> DeviationReport:
    """Step-function maximisation of an entrant's votes over ``(p, q)``.

    Breakpoints are voter positions and reflections of ``p`` and ``q`` in
    them; a voter exactly at a breakpoint is split and belongs to no open
    piece.  With ``bounds=(lo, hi)`` pieces are clipped to that closed range;
    the supremum is unchanged when every voter lies inside it.
    """
    if not p < q:
        raise HoteqError("gap needs p < q")
    if voters.density_mass > 0:
        raise HoteqError("gap_sup_atomic needs atom-only voters")
    cuts = set()
    for w in voters.atom_positions:
        cuts.add(w)
        if p != NEG_INF:
            cuts.add(2 * w - p)
        if q != POS_INF:
            cuts.add(2 * w - q)
    cuts = sorted(c for c in cuts if p < c < q)
    ends = [p] + cuts + [q]
    raw = []
    for lo, hi in zip(ends, ends[1:]):
        raw.append(((lo, hi), entrant_value(_inner_point(lo, hi), p, q, voters)))
    at_cut = [entrant_value(c, p, q, voters) for c in cuts]
    # merge neighbours whose values agree, including the separating point
    pieces = [raw[0]]
    for c_val, piece in zip(at_cut, raw[1:]):
        (plo, _), pval = pieces[-1]
        (_, hi), val = piece
        if val == pval and c_val == val:
            pieces[-1] = ((plo, hi), val)
        else:
            pieces.append(piece)
    if bounds is not None:
        b0, b1 = bounds
        pieces = [((max(lo, b0), min(hi, b1)), v) for (lo, hi), v in pieces]
        pieces = [(iv, v) for iv, v in pieces if iv[0] < iv[1]]
        if not pieces:
            return DeviationReport(Fraction(0), None, (), False)
    best = max(v for _, v in pieces)
    attaining = next(iv for iv, v in pieces if v == best)
    return DeviationReport(best, attaining, tuple(pieces), True, tuple(zip(cuts, at_cut)))


def _quad_max(g, lo: Fraction, hi: Fraction):
    """Maximum of a quadratic ``g`` on ``[lo, hi]`` as ``(value, argmax)``."""
    mid = (lo + hi) / 2
    g0, g1, g2 = g(lo), g(mid), g(hi)
    h = (hi - lo) / 2
    # g(lo + t) = a t^2 + b t + g0 with nodes t = 0, h, 2h
    a = (g2 - 2 * g1 + g0) / (2 * h * h)
    b = (g1 - g0) / h - a * h
    best = max((g0, lo), (g2, hi), key=lambda t: t[0])
    if a < 0:
        t = -b / (2 * a)
        if 0 < t < 2 * h:
            val = g(lo + t)
            if val > best[0]:
                best = (val, lo + t)
    return best


def gap_sup_density(p: ExtendedPos, q: ExtendedPos, voters: Voters) -> DeviationReport:
    """Best entry into ``(p, q)`` against nonatomic voters.

    Infinite endpoints are accepted: the objective is then monotone and the
    supremum is the limit at the finite end.
    """
    if not p < q:
        raise HoteqError("gap needs p < q")
    if voters.atoms:
        raise HoteqError("gap_sup_density needs nonatomic voters")
    W = voters.total
    if p == NEG_INF and q == POS_INF:
        return DeviationReport(W, (Fraction(0), Fraction(0)), (), True)
    if p == NEG_INF:
        return DeviationReport(voters.cdf(q), (q, q), (), False)
    if q == POS_INF:
        return DeviationReport(W - voters.cdf(p), (p, p), (), False)

    def g(z):
        return voters.cdf((z + q) / 2) - voters.cdf((p + z) / 2)

    cuts = set()
    for x in voters.knots():
        cuts.add(2 * x - q)
        cuts.add(2 * x - p)
    ends = [p] + sorted(c for c in cuts if p < c < q) + [q]
    best_val, best_z = None, None
    for lo, hi in zip(ends, ends[1:]):
        val, z = _quad_max(g, lo, hi)
        if best_val is None or val > best_val:
            best_val, best_z = val, z
    attained = p < best_z < q
    if not attained:
        # an interior point may tie with the open end
        for lo, hi in zip(ends, ends[1:]):
            val, z = _quad_max(g, lo, hi)
            if not p < z < q:
                z = (lo + hi) / 2
                val = g(z)
            if val == best_val:
                best_z, attained = z, True
                break
    return DeviationReport(best_val, (best_z, best_z), (), attained)


def gap_sup(p: ExtendedPos, q: ExtendedPos, voters: Voters, bounds=None) -> DeviationReport:
    if voters.kind == "atoms":
        return gap_sup_atomic(p, q, voters, bounds)
    if voters.kind == "density":
        return gap_sup_density(p, q, voters)
    raise HoteqError("continuous deviation analysis does not support mixed voters")
