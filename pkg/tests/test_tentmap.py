from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bfs_precritical, tent
from tentfold.numerics import QuadraticNumber
from tentfold.tentmap import HALF, DomainError, NotFoundWithinBound, TentMap

PHI = QuadraticNumber(Fraction(1, 2), Fraction(1, 2), 5)
SLOPES = [Fraction(17, 10), Fraction(3, 2), Fraction(19, 10), Fraction(13, 10), Fraction(11, 10), Fraction(2)]


def test_eval_examples(t17):
    assert t17.eval(HALF) == Fraction(17, 20)
    assert t17.eval(Fraction(17, 20)) == Fraction(51, 200)
    assert t17.eval(0) == 0
    with pytest.raises(DomainError):
        t17.eval(Fraction(11, 10))


def test_constants(t17):
    assert t17.c1 == Fraction(17, 20)
    assert t17.c2 == Fraction(17, 10) * (1 - Fraction(17, 20))
    assert t17.c1 >= t17.c >= t17.c2


def test_critical_orbit_examples(t17, golden):
    assert t17.critical_orbit(4) == [Fraction(17, 20), Fraction(51, 200), Fraction(867, 2000), Fraction(14739, 20000)]
    assert golden.critical_orbit(3) == [PHI / 2, PHI * (1 - PHI / 2), HALF]
    assert TentMap(Fraction(2)).critical_orbit(3) == [1, 0, 0]


def test_kappa(t17, golden):
    assert golden.compute_kappa(10) == 3
    assert t17.compute_kappa(10) == 4
    assert TentMap(Fraction(3, 2)).compute_kappa(10) == 3
    with pytest.raises(NotFoundWithinBound):
        TentMap(Fraction(2)).compute_kappa(20)


def test_kappa_invariant():
    for s in SLOPES[:-1]:
        t = TentMap(s)
        k = t.compute_kappa()
        orb = t.orbit(k)
        assert all(orb[i] < HALF for i in range(3, k)) and orb[k] >= HALF


def test_preimages(t17):
    assert t17.preimages(HALF) == [Fraction(5, 17), Fraction(12, 17)]
    assert t17.preimages(Fraction(17, 20)) == [HALF]
    assert TentMap(Fraction(2)).preimages(0) == [0, 1]
    with pytest.raises(DomainError):
        t17.preimages(Fraction(9, 10))


def test_precritical_examples(t17, golden):
    pts = t17.precritical_points(1, (Fraction(0), Fraction(17, 20)))
    assert [tuple(p) for p in pts] == [(Fraction(5, 17), 1), (HALF, 0), (Fraction(12, 17), 1)]
    assert [tuple(p) for p in t17.precritical_points(0, (Fraction(0), Fraction(1)))] == [(HALF, 0)]
    gp = golden.precritical_points(2, (Fraction(0), golden.c1))
    assert len(gp) == 7
    assert (golden.c1, 2) in [tuple(p) for p in gp]


@pytest.mark.parametrize("s", SLOPES)
@pytest.mark.parametrize("k", [0, 1, 3, 6, 9])
def test_precritical_matches_bfs(s, k):
    t = TentMap(s)
    for window in [(Fraction(0), t.c1), (Fraction(0), Fraction(1)), (Fraction(1, 3), Fraction(2, 5))]:
        pts = t.precritical_points(k, window)
        xs = [p.x for p in pts]
        assert xs == sorted(set(xs))
        assert dict((p.x, p.order) for p in pts) == bfs_precritical(t, k, *window)


@pytest.mark.parametrize("s", SLOPES[:4])
def test_minimal_orders_certified(s):
    t = TentMap(s)
    for x, order in t.precritical_points(7):
        assert t.iterate(x, order) == HALF
        assert all(t.iterate(x, i) != HALF for i in range(order))


def test_preperiodic(golden, t17):
    assert str(golden.is_preperiodic(5)) == "yes(0,3)"
    assert str(TentMap(Fraction(2)).is_preperiodic(4)) == "yes(2,3)"
    assert str(t17.is_preperiodic(30)) == "noWitnessUpTo(30)"


def test_orbit_self_consistency():
    for s in SLOPES + [PHI]:
        t = TentMap(s)
        x = HALF
        for v in t.critical_orbit(12):
            x = t.eval(x)
            assert x == v


@settings(max_examples=100)
@given(st.fractions(min_value=0, max_value=1, max_denominator=10**5), st.sampled_from(SLOPES))
def test_reflection_symmetry(x, s):
    t = TentMap(s)
    assert t.eval(x) == t.eval(1 - x)


@pytest.mark.parametrize("slope_text", ["17/10", "3/2", "golden", "19/10"])
def test_counting_matches_enumeration(slope_text):
    t = tent(slope_text)
    rng = random.Random(3)
    for k in range(8):
        xs = [p.x for p in t.precritical_sequence(k)]
        probes = xs + [Fraction(rng.randint(0, 1000), 1000) * t.c1 for _ in range(20)]
        for v in probes:
            assert t.count_precritical_below(k, v) == sum(1 for x in xs if x < v)
        for i in range(6):
            assert t.orbit_count(k, i) == t.count_precritical_below(k, t.orbit(i)[i])
        assert t.precritical_count(k) == len(xs)


def test_closest_precritical_inequality():
    from tentfold.symmetry import closest_precriticals

    for s in SLOPES[:4]:
        t = TentMap(s)
        orb = t.orbit(20)
        for z in closest_precriticals(t, 20):
            assert abs(orb[z.k] - HALF) >= s**z.k * abs(z.z - HALF)


def test_slope_domain():
    with pytest.raises(DomainError):
        TentMap(Fraction(1))
    with pytest.raises(DomainError):
        TentMap(Fraction(21, 10))
