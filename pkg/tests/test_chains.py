from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import tent
from tentfold.chains import (
    BadCenter,
    ChainTooCoarse,
    IndexTooSmall,
    NotATurn,
    _symmetric_radius,
    admissible_off_centers,
    build_chain,
    chain_condition_holds,
    itinerary,
    itinerary_csv,
    link_walk,
    max_link_symmetric_arc,
    mesh_bound,
    off_center_snappy_bound,
    refines,
    scale_for_width,
    snappy_count,
    width_bound,
)
from tentfold.composant import STAR, ray_segment
from tentfold.tentmap import HALF

SLOPE_TEXTS = ["17/10", "3/2", "19/10", "golden", "13/10"]


def explicit_walk(t, p: int, depth: int) -> list[int]:
    """Visited links found by walking an explicit chain between projected turning values."""
    chain = build_chain(t, p)
    cuts = chain.cuts
    seg = ray_segment(t, depth, p)
    orb = t.orbit(depth + 1)
    links = [1]
    prev = Fraction(0)
    for pt in seg.points[1:]:
        if pt.level is STAR or pt.level == 0:
            continue
        v = orb[pt.level]
        going_up = v > prev
        prev = v
        k = sum(1 for c in cuts[1:-1] if c < v) + 1
        if v in cuts[1:-1] and going_up:
            k -= 1  # a maximum at a cut point stays in the link below
        cur = links[-1]
        step = 1 if k > cur else -1
        while cur != k:
            cur += step
            links.append(cur)
    return links


@pytest.mark.parametrize("slope_text", SLOPE_TEXTS)
@pytest.mark.parametrize("p", [0, 1, 2, 4])
@pytest.mark.parametrize("depth", [1, 3, 6])
def test_link_walk_matches_explicit(slope_text, p, depth):
    t = tent(slope_text)
    walk = link_walk(t, p, depth)
    assert [walk.link_at(g) for g in range(walk.length)] == explicit_walk(t, p, depth)


def test_itinerary_example(t17):
    itin = itinerary(ray_segment(t17, 1), 0)
    assert [(s.link, s.kind, s.level) for s in itin.steps] == [(1, "straight", None), (2, "turn", 1), (1, "turn", 2)]
    csv = itinerary_csv(itin)
    assert csv.splitlines()[0] == "step,linkIndex,kind,pPointLevel"
    assert csv.splitlines()[1] == "1,1,straight,"


@pytest.mark.parametrize("slope_text", SLOPE_TEXTS)
def test_turn_steps_contain_p_points(slope_text):
    t = tent(slope_text)
    for p in range(4):
        chain = build_chain(t, p)
        walk = link_walk(t, p, 6)
        itin = itinerary(walk.segment, chain)
        for g, st in enumerate(itin.steps):
            if st.kind == "turn":
                a, b = chain.links[st.link - 1]
                assert all(a <= tp.value <= b for tp in walk.turn_visits[g])


@pytest.mark.parametrize("slope_text", SLOPE_TEXTS)
def test_chain_laws(slope_text):
    t = tent(slope_text)
    for p in range(7):
        fine, coarse = build_chain(t, p + 1), build_chain(t, p)
        assert chain_condition_holds(fine)
        assert refines(fine, coarse)
        assert fine.width <= width_bound(t, p + 1)


def test_refines_detects_missing_cut(t17):
    c1 = build_chain(t17, 1)
    c0 = build_chain(t17, 0)
    assert Fraction(5, 17) in c1.cuts
    broken = type(c1)(t17, 1, tuple(c for c in c1.cuts if c != Fraction(5, 17)))
    assert not refines(broken, c0)
    with pytest.raises(ValueError):
        refines(c1, c1)


def test_chain_condition_detects_overlap(t17):
    c = build_chain(t17, 2)
    bad = type(c)(t17, 2, c.cuts[:2] + c.cuts[1:])
    assert not chain_condition_holds(bad)


def test_link_of(t17):
    c = build_chain(t17, 1)
    assert c.links[0] == (0, Fraction(5, 17))
    assert c.link_of(HALF) == 2 and c.link_of(HALF, prefer="above") == 3
    assert c.link_of(Fraction(1, 10)) == 1


def test_width_and_mesh(t17):
    assert scale_for_width(t17, Fraction(1, 1000)) == 12
    assert width_bound(t17, 12) < Fraction(1, 1000) <= width_bound(t17, 11)
    assert mesh_bound(t17, 3, width_bound(t17, 3)) > Fraction(1, 8)


@pytest.mark.parametrize("slope_text", ["17/10", "golden", "3/2"])
def test_symmetric_radius_brute(slope_text):
    t = tent(slope_text)
    for p in (0, 2, 3):
        walk = link_walk(t, p, 7)
        seq = [walk.link_at(g) for g in range(walk.length)]
        for g0 in walk.turn_visits:
            r = 0
            while g0 - r - 1 >= 0 and g0 + r + 1 < len(seq) and seq[g0 - r - 1] == seq[g0 + r + 1]:
                r += 1
            assert _symmetric_radius(walk, g0)[0] == r


def test_golden_link_symmetric(golden):
    walk = link_walk(golden, 0, 8)
    with pytest.raises(NotATurn):
        max_link_symmetric_arc(walk, next(g for g in range(walk.length) if not walk.is_turn(g)))


def test_snappy_count_small_scale_golden(golden):
    rep = snappy_count(golden, 3, 5)
    assert rep.count == rep.i + 1 > rep.kappa


def test_snappy_count_errors(t17):
    with pytest.raises(IndexTooSmall):
        snappy_count(t17, 0, 2)
    with pytest.raises(ChainTooCoarse):
        snappy_count(t17, 1, 4, epsilon=Fraction(1, 10**6))
    with pytest.raises(IndexTooSmall):
        off_center_snappy_bound(t17, 0, 3)


def test_off_center_bad_center(t17):
    walk = link_walk(t17, 6, 7)
    ys = admissible_off_centers(walk, 5)
    bad = walk.segment.snappy()[4].arc_index
    assert bad not in ys
    with pytest.raises(BadCenter):
        off_center_snappy_bound(t17, 6, 5, y_arc_index=bad)
