from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import bfs_precritical, tent
from tentfold.composant import (
    STAR,
    FoldingPattern,
    InvalidProjection,
    arc_length,
    folding_pattern,
    p_symmetric_arc,
    palindrome_radius,
    ray_segment,
    shift,
    snappy_points,
)
from tentfold.numerics import BudgetExceeded
from tentfold.tentmap import TentMap

GOLDEN_PRINTED = [STAR] + [int(c) for c in "010201310204020131050131020402016102040201"]


def fp_oracle(t: TentMap, j: int) -> list:
    """Levels along [0, c1] from a breadth-first preimage tree, endpoint forced to j+1."""
    pts = bfs_precritical(t, j, 0, t.c1)
    pts.pop(t.c1, None)
    return [STAR] + [j - pts[x] for x in sorted(pts)] + [j + 1]


def test_golden_printed_prefix(golden):
    fp = folding_pattern(golden, 44)
    assert len(fp) == 44
    assert list(fp)[:43] == GOLDEN_PRINTED
    assert fp.snappy_indices() == [3, 5, 8, 13, 21, 34]


@pytest.mark.parametrize("slope_text", ["17/10", "3/2", "golden", "19/10", "13/10", "2"])
@pytest.mark.parametrize("j", [0, 1, 2, 5, 8])
def test_ray_segment_matches_oracle(slope_text, j):
    t = tent(slope_text)
    assert ray_segment(t, j).levels == fp_oracle(t, j)


def test_fp_examples(t17):
    assert list(folding_pattern(t17, 7)) == [STAR, 0, 1, 0, 2, 0, 1]
    assert folding_pattern(t17, 11).snappy_indices() == [3, 5, 9]
    with pytest.raises(ValueError):
        folding_pattern(t17, 0)
    with pytest.raises(BudgetExceeded):
        folding_pattern(t17, 200, max_depth=3)


def test_fp_json_round_trip(golden):
    fp = folding_pattern(golden, 20)
    back = FoldingPattern.from_json(fp.dumps())
    assert back == fp
    assert fp.to_json()["entries"][0] == "*"


def test_snappy_points(t17):
    pts = snappy_points(t17, 0, 3)
    assert [p.level for p in pts] == [1, 2, 3]
    assert [p.arc_index for p in pts] == [3, 5, 9]
    assert pts[-1].position == t17.c1


def test_arc_length_ratio_law(t17):
    seg = ray_segment(t17, 0)
    s1 = seg.snappy()[0]
    assert arc_length(seg, s1) == Fraction(17, 20)
    for r in (1, 2, 5):
        shifted = shift(seg, r)
        assert shifted.levels == seg.levels
        assert arc_length(shifted, s1) == Fraction(17, 10) ** r * arc_length(seg, s1)
    # deeper segments give the same length to the same point
    deep = ray_segment(t17, 4)
    assert arc_length(deep, deep.snappy()[0]) == Fraction(17, 20)
    with pytest.raises(InvalidProjection):
        arc_length(seg, deep.points[2])


def test_shift_rejects_negative(t17):
    with pytest.raises(ValueError):
        shift(ray_segment(t17, 1), -1)


def test_palindrome_radius_brute():
    seq = [STAR, 0, 1, 0, 2, 0, 1, 0, 3, 0, 1]
    for c in range(1, len(seq) + 1):
        r = 0
        while c - 2 - r >= 0 and c + r < len(seq) and seq[c - 2 - r] == seq[c + r] and seq[c + r] is not STAR:
            r += 1
        assert palindrome_radius(seq, c).radius == r


def test_golden_p_symmetric_arc(golden):
    seg = ray_segment(golden, 6)
    arc = p_symmetric_arc(seg, 21)
    assert seg.levels[20] == 5
    assert arc.radius == 12 and not arc.truncated_at_alpha
