from fractions import Fraction as F

import pytest

from hoteq.core import FiniteSet, Instance, Interval, Voters


def atoms_instance(atoms: dict, R, m, finite=None):
    voters = Voters(tuple((F(p), F(w)) for p, w in sorted(atoms.items())))
    space = FiniteSet(tuple(F(p) for p in finite)) if finite is not None else Interval(F(R))
    return Instance(space, voters, m)


def density_instance(points, m, M=None):
    voters = Voters(density=tuple((F(x), F(f)) for x, f in points))
    R = max(F(x) for x, _ in points)
    return Instance(Interval(R), voters, m, None if M is None else F(M))


DELTA = F(1, 1000)
VIOLATION_DENSITY = [(0, 0), (1, F(2, 5)), (2, 0), (3, 0), (4, F(1, 5)), (5, 0),
                     (6, 0), (7, F(2, 5)), (8, 0)]


def violation_profile(d=DELTA):
    return (1 - d / 2, 1 + d / 2, F(4), 7 - d / 2, 7 + d / 2)


@pytest.fixture
def fig1():
    return atoms_instance({0: 10, 2: 10, 10: 10}, 10, 3)


@pytest.fixture
def fig2():
    return atoms_instance({0: 5, 2: 5, 6: 2, 11: 2, 17: 5, 20: 5}, 20, 5)


@pytest.fixture
def fig4():
    return atoms_instance({0: 5, 2: 5, 7: 2, 11: 2, 16: 5, 18: 5}, 18, 5)


@pytest.fixture
def uniform():
    return lambda m: density_instance([(0, 1), (1, 1)], m, M=1)


@pytest.fixture
def triangle():
    return lambda m: density_instance([(0, 0), (1, 1), (2, 0)], m, M=1)


@pytest.fixture
def violation():
    return density_instance(VIOLATION_DENSITY, 5, M=F(2, 5))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
