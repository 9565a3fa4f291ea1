import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from hoteq.core import HoteqError
from hoteq.io import load_instance
from hoteq.utility import move, util, utilities
from hoteq.verify import (best_response, brute_force_solve, is_eps_equilibrium,
                          is_equilibrium, is_equilibrium_direct)

from conftest import DELTA, atoms_instance, density_instance, violation_profile


def table1():
    inst, extras = load_instance("table1.json")
    return inst, extras["profile"]


def replay_gain(S, inst, dev):
    j = dev.candidate - 1
    return util(dev.position, move(S, j, dev.position), inst.voters).total - utilities(S, inst.voters)[j]


def test_table1_is_equilibrium():
    inst, S = table1()
    rep = is_equilibrium(S, inst)
    assert rep.is_equilibrium
    assert rep.per_candidate_utilities == [1, 1, 2, 1, 1, 2, 1, 1]
    assert rep.prop1_minu >= rep.prop1_maxd


def test_table1_perturbed_fails_with_witness():
    inst, S = table1()
    bad = (S[0] - F(1, 8),) + S[1:]
    rep = is_equilibrium(bad, inst)
    assert not rep.is_equilibrium
    dev = rep.improving_deviation
    assert rep.failing_candidate == dev.candidate == 2
    assert F(9, 4) < dev.position < F(19, 8)
    assert dev.gain > 0 and replay_gain(bad, inst, dev) == dev.gain


def test_fixture_profiles(fig1, fig2, fig4):
    assert is_equilibrium((0, 2, 10), fig1)
    rep = is_equilibrium((0, 2, 8, 17, 20), fig2)
    assert rep and rep.per_candidate_utilities == [5, 5, 4, 5, 5]
    rep = is_equilibrium((0, 2, 9, 16, 18), fig4)
    assert rep and rep.per_candidate_utilities == [5, 5, 4, 5, 5]


def test_fig4_middle_candidate_interval(fig4):
    for z in (F(8) + F(1, 100), F(9), F(19, 2), F(10) - F(1, 100)):
        assert is_equilibrium((0, 2, z, 16, 18), fig4)
    for z in (F(7), F(11)):
        assert not is_equilibrium((0, 2, z, 16, 18), fig4)


def test_single_candidate_always_equilibrium():
    rng = random.Random(3)
    for _ in range(30):
        atoms = {rng.randint(0, 9): rng.randint(1, 4) for _ in range(rng.randint(1, 4))}
        inst = atoms_instance(atoms, 10, 1)
        assert is_equilibrium((F(rng.randint(0, 10)),), inst)


def test_brute_force_fig1():
    inst = atoms_instance({0: 10, 2: 10, 10: 10}, None, 3, finite=(0, 2, 10))
    assert brute_force_solve(inst) == {(0, 2, 10)}


def test_brute_force_two_atoms():
    inst = atoms_instance({0: 1, 1: 1}, None, 2, finite=(0, 1))
    assert brute_force_solve(inst) == {(0, 1)}


def test_brute_force_limit():
    inst = atoms_instance({0: 1, 1: 1}, None, 2, finite=range(40))
    with pytest.raises(HoteqError):
        brute_force_solve(inst, limit=100)


def test_gap_and_direct_paths_agree_random():
    rng = random.Random(21)
    for _ in range(300):
        atoms = {rng.randint(0, 8): rng.randint(1, 3) for _ in range(rng.randint(1, 5))}
        m = rng.randint(1, 4)
        inst = atoms_instance(atoms, 8, m)
        pts = sorted(rng.sample([F(k, 2) for k in range(17)], m))
        rep = is_equilibrium(pts, inst)
        assert rep.is_equilibrium == is_equilibrium_direct(pts, inst)[0]
        if not rep.is_equilibrium:
            dev = rep.improving_deviation
            assert dev.gain > 0 and replay_gain(tuple(pts), inst, dev) == dev.gain


def test_gap_and_direct_paths_agree_density():
    rng = random.Random(22)
    inst = density_instance([(0, 0), (1, 1), (2, 0), (3, 2), (4, 0)], 3, M=2)
    for _ in range(40):
        pts = sorted(rng.sample([F(k, 4) for k in range(17)], 3))
        assert is_equilibrium(pts, inst).is_equilibrium == is_equilibrium_direct(pts, inst)[0]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 16), min_size=3, max_size=3, unique=True),
       st.dictionaries(st.integers(0, 8), st.integers(1, 3), min_size=1, max_size=4),
       st.integers(0, 8))
def test_eps_monotone(raw, atoms, e):
    inst = atoms_instance(atoms, 8, 3)
    S = sorted(F(x, 2) for x in raw)
    eps = F(e, 2)
    if is_eps_equilibrium(S, inst, eps):
        assert is_eps_equilibrium(S, inst, eps + F(1, 2))
    assert is_eps_equilibrium(S, inst, inst.total)


def test_witness_beats_eps():
    inst = atoms_instance({0: 3, 4: 1, 8: 3}, 8, 3)
    S = (F(0), F(4), F(8))
    for eps in (F(0), F(1, 4)):
        rep = is_eps_equilibrium(S, inst, eps)
        if not rep.is_equilibrium:
            assert rep.improving_deviation.gain > eps


def test_negative_eps_rejected(fig1):
    with pytest.raises(HoteqError):
        is_eps_equilibrium((0, 2, 10), fig1, -1)


def test_violation_profile_not_equilibrium(violation):
    S = violation_profile()
    rep = is_equilibrium(S, violation)
    assert not rep.is_equilibrium
    assert rep.improving_deviation.gain > 0
    dev = best_response(S, violation, 3)
    assert dev.gain > 0
    assert 1 + DELTA / 2 < dev.position < 7 - DELTA / 2
    assert replay_gain(S, violation, dev) == dev.gain


def test_best_response_at_equilibrium(fig1):
    for j in (1, 2, 3):
        assert best_response((0, 2, 10), fig1, j).gain == 0
    with pytest.raises(HoteqError):
        best_response((0, 2, 10), fig1, 4)


def test_three_quantiles_not_near_equilibrium(uniform):
    inst = uniform(3)
    S = (F(1, 4), F(1, 2), F(3, 4))
    rep = is_eps_equilibrium(S, inst, F(1, 100))
    assert not rep.is_equilibrium
    assert rep.improving_deviation.gain > F(1, 100)
    # candidate 1 approaches 1/2 by sitting just left of 1/2: supremum gain 1/8
    ok, us, best = is_equilibrium_direct(S, inst)
    assert best[0] - us[0] == F(1, 8)
    assert is_equilibrium_direct(S, inst, F(1, 8))[0]
