from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import pytest

from tentfold.chains import scale_for_width
from tentfold.numerics import parse_slope
from tentfold.symmetry import select_params
from tentfold.tentmap import HALF, TentMap

LEMMA_SLOPES = (Fraction(17, 10), Fraction(3, 2), Fraction(19, 10))


@lru_cache(maxsize=None)
def tent(slope_text: str) -> TentMap:
    return TentMap(parse_slope(slope_text))


@lru_cache(maxsize=None)
def params_for(s: Fraction):
    t = TentMap(s)
    params = select_params(t)
    return t, params, scale_for_width(t, params.epsilon)


def bfs_precritical(t: TentMap, max_order: int, lo, hi) -> dict:
    """Independent preimage-tree enumeration: position -> minimal order."""
    found = {HALF: 0}
    frontier = [HALF]
    for order in range(1, max_order + 1):
        nxt = []
        for y in frontier:
            if y > t.c1:
                continue
            for x in (y / t.slope, 1 - y / t.slope):
                if x not in found:
                    found[x] = order
                    nxt.append(x)
        frontier = nxt
    return {x: o for x, o in found.items() if lo <= x <= hi}


@pytest.fixture
def t17() -> TentMap:
    return TentMap(Fraction(17, 10))


@pytest.fixture
def golden() -> TentMap:
    return tent("golden")


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {note}")
