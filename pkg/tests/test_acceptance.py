"""The twelve acceptance criteria, one test each, with their time limits.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary and also to stdout (visible with ``-s``).
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from fractions import Fraction

from conftest import ACCEPTANCE, LEMMA_SLOPES, params_for, tent
from tentfold.chains import (
    build_chain,
    chain_condition_holds,
    itinerary,
    link_walk,
    off_center_snappy_bound,
    refines,
    snappy_count,
)
from tentfold.classify import distinguish, reduce_slope, shift_action_check
from tentfold.composant import STAR, folding_pattern, ray_segment
from tentfold.numerics import parse_slope
from tentfold.symmetry import asymmetry_scan, jdelta, verify_params
from tentfold.tentmap import HALF, TentMap

GOLDEN_PRINTED = [STAR] + [int(c) for c in "010201310204020131050131020402016102040201"]
SPREAD = ["11/10", "quad:4,0,-5", "13/10", "sqrt2", "3/2", "golden", "17/10", "quad:1,0,-3", "19/10", "2"]


@contextmanager
def criterion(n: int, limit: float, note: str = ""):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit
        ACCEPTANCE[n] = (ok, f"{note} ({elapsed:.2f}s, limit {limit:g}s)")
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {note} ({elapsed:.2f}s)")
    assert elapsed < limit, f"criterion {n} took {elapsed:.1f}s"


def test_c01_golden_folding_pattern():
    with criterion(1, 1.0, "golden FP, 44 entries"):
        fp = folding_pattern(TentMap(parse_slope("golden")), 44)
        assert len(fp) == 44
        assert list(fp)[: len(GOLDEN_PRINTED)] == GOLDEN_PRINTED
        assert fp.snappy_indices() == [3, 5, 8, 13, 21, 34]


def test_c02_universal_prefix():
    with criterion(2, 1.0, "prefix *,0,1,0,2,0,1 on 10 slopes"):
        for slope_text in SPREAD:
            assert list(folding_pattern(TentMap(parse_slope(slope_text)), 7)) == [STAR, 0, 1, 0, 2, 0, 1], slope_text


def test_c03_prefix_stability_and_p_independence():
    with criterion(3, 30.0, "prefix stability to 60, p in {0,1,2,5}"):
        for slope_text in ("17/10", "golden", "13/10", "19/10"):
            t = tent(slope_text)
            full = list(folding_pattern(t, 60))
            for n in range(1, 60):
                assert list(folding_pattern(t, n)) == full[:n]
            for j in range(8):
                base = ray_segment(t, j, 0).levels
                for p in (1, 2, 5):
                    assert ray_segment(t, j, p).levels == base


def test_c04_snappy_count():
    with criterion(4, 300.0, "snappy count equals kappa"):
        for s in LEMMA_SLOPES:
            t, params, p = params_for(s)
            k = params.kappa
            for i in range(k - 1, k + 7):
                rep = snappy_count(t, p, i, epsilon=params.epsilon)
                assert rep.ok, (s, i, rep)


def test_c05_off_center_bound():
    with criterion(5, 300.0, "off-centre arcs hold at most one snappy point"):
        checked = 0
        for s in LEMMA_SLOPES:
            t, params, p = params_for(s)
            k = params.kappa
            for i in range(k, k + 5):
                for rep in off_center_snappy_bound(t, p, i, epsilon=params.epsilon):
                    assert rep.ok, (s, i, rep)
                    checked += 1
        assert checked > 0


def test_c06_asymmetry_scan():
    with criterion(6, 600.0, "no epsilon-symmetric instances"):
        for s in LEMMA_SLOPES:
            t, params, _ = params_for(s)
            rep = asymmetry_scan(t, params, 12, 32)
            assert rep.counterexamples == []
            assert rep.min_slack > 0


def test_c07_parameter_certificates():
    with criterion(7, 10.0, "selectParams certificates"):
        for s in LEMMA_SLOPES:
            t, params, _ = params_for(s)
            certs = verify_params(t, params)
            assert certs and all(c.holds for c in certs), [c for c in certs if not c.holds]
            assert s**params.N0 > 100
        assert params_for(Fraction(17, 10))[1].N0 == 9


def _monotone(t, lo, hi, l):
    if l == 0:
        return True
    return not [x for x, _ in t.precritical_points(l - 1, (lo, hi)) if lo < x < hi]


def test_c08_jdelta():
    with criterion(8, 120.0, "jdelta on 100 random intervals per slope"):
        for s in LEMMA_SLOPES:
            t, params, _ = params_for(s)
            d = params.delta
            rng = random.Random(hash(s) & 0xFFFF)
            for _ in range(100):
                L = 22 * d * (1 + Fraction(rng.randint(0, 2000), 100))
                x = Fraction(rng.randint(0, 10**6), 10**6) * (1 - L) + L / 2
                Jt = (x - L / 2, x + L / 2)
                res = jdelta(t, Jt, d)
                lo, hi = res.J
                assert Jt[0] <= lo < hi <= Jt[1] and lo + hi == Jt[0] + Jt[1]
                assert res.l <= params.r0 * params.N
                assert _monotone(t, lo, hi, res.l)
                a, b = sorted((t.iterate(lo, res.l), t.iterate(hi, res.l)))
                assert a <= HALF - d and HALF + d <= b


def test_c09_renormalization():
    with criterion(9, 1.0, "13/10 reduces to 169/100"):
        step = reduce_slope(Fraction(13, 10), samples=50)
        assert step.reduced_slope == Fraction(169, 100)
        assert step.samples_checked == 50


def test_c10_distinguisher():
    with criterion(10, 60.0, "golden vs 17/10 at index 8; random pairs decided"):
        assert distinguish(parse_slope("golden"), Fraction(17, 10), 12).first_discrepancy == 8
        same = distinguish(Fraction(17, 10), Fraction(17, 10), 12)
        assert same.identical and same.first_discrepancy is None
        rng = random.Random(10)
        pairs = set()
        while len(pairs) < 10:
            a = Fraction(rng.randint(142, 199), 100)
            b = Fraction(rng.randint(142, 199), 100)
            if a != b:
                pairs.add((a, b))
        for a, b in sorted(pairs):
            rep = distinguish(a, b, 25)
            assert rep.first_discrepancy is not None and rep.depth_used <= 25, (a, b)


def test_c11_shift_action():
    with criterion(11, 60.0, "shift action R in {0,1,3}, depth 12"):
        for slope_text in ("17/10", "golden"):
            for R in (0, 1, 3):
                rep = shift_action_check(tent(slope_text), R, 12)
                assert rep.ok, (slope_text, R, rep.details)


def test_c12_chain_laws():
    with criterion(12, 120.0, "refinement, chain condition, turns contain p-points"):
        for slope_text in ("17/10", "3/2", "19/10", "golden"):
            t = tent(slope_text)
            for p in range(7):
                assert chain_condition_holds(build_chain(t, p))
                assert refines(build_chain(t, p + 1), build_chain(t, p))
                chain = build_chain(t, p)
                walk = link_walk(t, p, 8)
                for g, st in enumerate(itinerary(walk.segment, chain).steps):
                    if st.kind == "turn":
                        a, b = chain.links[st.link - 1]
                        assert walk.turn_visits[g] and all(a <= tp.value <= b for tp in walk.turn_visits[g])
