"""Natural chains C_p, link itineraries of the ray, and link-symmetric arcs.

Large scales p are handled without listing links: the link holding a value v
is 1 + |S_p ∩ [0, v)|, which the tent map counts along the orbit of v.  The
ray's projection is piecewise monotone with turning values c_L, so the visited
link sequence is piecewise linear in the step index and is stored by its knots.
"""

from __future__ import annotations

import bisect
import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .composant import STAR, RaySegment, ray_segment
from .numerics import format_scalar
from .tentmap import HALF, TentMap

__all__ = [
    "ChainTooCoarse",
    "IndexTooSmall",
    "NotATurn",
    "BadCenter",
    "NaturalChain",
    "build_chain",
    "chain_condition_holds",
    "refines",
    "Step",
    "LinkItinerary",
    "itinerary",
    "itinerary_csv",
    "TurnPoint",
    "LinkWalk",
    "link_walk",
    "LinkSymmetricArc",
    "max_link_symmetric_arc",
    "SnappyCountReport",
    "snappy_count",
    "OffCenterReport",
    "off_center_snappy_bound",
    "admissible_off_centers",
    "width_bound",
    "scale_for_width",
    "mesh_bound",
]


class ChainTooCoarse(ValueError):
    pass


class IndexTooSmall(ValueError):
    pass


class NotATurn(ValueError):
    pass


class BadCenter(ValueError):
    pass


# -- chains ----------------------------------------------------------------------


@dataclass(frozen=True)
class NaturalChain:
    """Links [cut_k, cut_{k+1}] of [0, s/2]; ``cuts`` includes 0 and s/2."""

    tent: TentMap
    p: int
    cuts: tuple

    @property
    def links(self) -> list[tuple]:
        return list(zip(self.cuts, self.cuts[1:]))

    def __len__(self) -> int:
        return len(self.cuts) - 1

    @property
    def width(self):
        return max(b - a for a, b in self.links)

    def link_of(self, v, prefer: str = "below") -> int:
        """1-based link containing v; a shared endpoint goes to the ``prefer`` side."""
        k = bisect.bisect_left(self.cuts, v)
        if k < len(self.cuts) and self.cuts[k] == v:
            if prefer == "below":
                return max(k, 1)
            return min(k + 1, len(self))
        return k


def build_chain(tent: TentMap, p: int) -> NaturalChain:
    """C_p with cuts at {0, s/2} and every point of S_p inside."""
    if p < 0:
        raise ValueError("p must be >= 0")
    c1 = tent.c1
    inner = [x for x, _ in tent.precritical_sequence(p) if 0 < x < c1]
    return NaturalChain(tent, p, tuple([Fraction(0)] + inner + [c1]))


def chain_condition_holds(chain: NaturalChain) -> bool:
    """I^i ∩ I^j ≠ ∅ iff |i-j| <= 1, checked on the closed links."""
    links = chain.links
    for i, (a, b) in enumerate(links):
        if not a < b:
            return False
        for j in range(i + 1, len(links)):
            c, d = links[j]
            meet = max(a, c) <= min(b, d)
            if meet != (j - i <= 1):
                return False
    return True


def _image(f: Callable, tent: TentMap, a, b) -> tuple:
    ya, yb = f(a), f(b)
    lo, hi = (ya, yb) if ya <= yb else (yb, ya)
    if f is tent.eval and a < HALF < b:
        hi = tent.c1
    return lo, hi


def refines(fine: NaturalChain, coarse: NaturalChain, f: Callable | None = None) -> bool:
    """Every f-image of a fine link lies in one coarse link (f defaults to T)."""
    tent = fine.tent
    if f is None:
        if fine.p != coarse.p + 1:
            raise ValueError("refines compares C_{p+1} with C_p")
        f = tent.eval
    cuts = coarse.cuts
    for a, b in fine.links:
        lo, hi = _image(f, tent, a, b)
        k = bisect.bisect_right(cuts, lo) - 1
        k = min(k, len(cuts) - 2)
        if not (cuts[k] <= lo and hi <= cuts[k + 1]):
            return False
    return True


def width_bound(tent: TentMap, p: int):
    """Rigorous bound width(C_p) <= s^{-p}/2 (T^p maps a link monotonically to one side of c)."""
    return HALF / tent.slope**p


def scale_for_width(tent: TentMap, epsilon) -> int:
    """Smallest p with s^{-p}/2 < epsilon."""
    p = 0
    while not width_bound(tent, p) < epsilon:
        p += 1
    return p


def mesh_bound(tent: TentMap, p: int, width) -> object:
    """Upper bound on diam of pi_p^{-1}(I) with |I| <= width, metric sum 2^{-n}|x_{-n} - y_{-n}|.

    Coordinates n <= p are forward images (factor s^{p-n}); the tail beyond p
    contributes at most 2^{-p}.
    """
    s = tent.slope
    head = sum(Fraction(1, 2**n) * s ** (p - n) * width for n in range(p + 1))
    return head + Fraction(1, 2**p)


# -- link walks ----------------------------------------------------------------------


@dataclass(frozen=True)
class TurnPoint:
    arc_index: int
    level: int
    value: object  # pi_p projection c_L
    visit: int  # 0-based step index of the containing link visit
    link: int


@dataclass
class LinkWalk:
    """Visited-link sequence of [alpha, s_{depth+1}] in C_p, stored by direction knots."""

    tent: TentMap
    p: int
    segment: RaySegment
    knots: list[tuple[int, int]]
    turns: list[TurnPoint]
    turn_visits: dict[int, list[TurnPoint]] = field(default_factory=dict)

    @property
    def length(self) -> int:
        return self.knots[-1][0] + 1

    def link_at(self, g: int) -> int:
        knots = self.knots
        if not 0 <= g < self.length:
            raise IndexError("step outside the walk")
        k = bisect.bisect_right(knots, (g, float("inf"))) - 1
        g0, l0 = knots[k]
        if g == g0 or k == len(knots) - 1:
            return l0
        g1, l1 = knots[k + 1]
        return l0 + (1 if l1 > l0 else -1) * (g - g0)

    def visit_of(self, arc_index: int) -> int:
        for t in self.turns:
            if t.arc_index == arc_index:
                return t.visit
        raise NotATurn(f"p-point {arc_index} is not a turning point")

    def snappy_visits(self) -> dict[int, int]:
        """level i -> visit index of s_i (at this scale)."""
        out: dict[int, int] = {}
        for t in self.turns:
            pt = self.segment.point(t.arc_index)
            if pt.snappy:
                out[t.level] = t.visit
        return out

    def is_turn(self, g: int) -> bool:
        return g in self.turn_visits


def _link_of_value(tent: TentMap, p: int, level: int, is_max: bool) -> int:
    below = tent.orbit_count(p, level)
    v = tent.orbit(level)[level]
    if v != tent.c1 and 0 < v and tent.orbit_hits_c(level, p):
        return below if is_max else below + 1
    return below + 1


def link_walk(tent: TentMap, p: int, depth: int) -> LinkWalk:
    """Compressed itinerary of the ray segment of the given depth through C_p."""
    if p < 0 or depth < 0:
        raise ValueError("p and depth must be nonnegative")
    seg = ray_segment(tent, depth, p)
    orb = tent.orbit(depth + 1)
    knots: list[tuple[int, int]] = [(0, 1)]
    turns: list[TurnPoint] = []
    tv: dict[int, list[TurnPoint]] = {}
    g, cur, direction = 0, 1, 0
    prev_value = Fraction(0)
    for pt in seg.points[1:]:
        if pt.level is STAR or pt.level == 0:
            continue
        v = orb[pt.level]
        is_max = v > prev_value
        prev_value = v
        k = _link_of_value(tent, p, pt.level, is_max)
        if k != cur:
            d = 1 if k > cur else -1
            if direction != 0 and d != direction and knots[-1][0] != g:
                knots.append((g, cur))
            g += abs(k - cur)
            cur, direction = k, d
        tp = TurnPoint(pt.arc_index, pt.level, v, g, cur)
        turns.append(tp)
        tv.setdefault(g, []).append(tp)
    if knots[-1][0] != g:
        knots.append((g, cur))
    return LinkWalk(tent, p, seg, knots, turns, tv)


@dataclass(frozen=True)
class Step:
    link: int
    kind: str  # "straight" | "turn"
    level: int | None = None  # highest p-level of the turning p-points in the visit


@dataclass(frozen=True)
class LinkItinerary:
    steps: tuple[Step, ...]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def links(self) -> list[int]:
        return [s.link for s in self.steps]


def itinerary(seg: RaySegment, chain: NaturalChain | int, max_steps: int = 1_000_000) -> LinkItinerary:
    """Expanded list of visited links with straight/turn flags."""
    p = chain.p if isinstance(chain, NaturalChain) else int(chain)
    walk = link_walk(seg.tent, p, seg.depth)
    return _expand(walk, max_steps)


def _expand(walk: LinkWalk, max_steps: int) -> LinkItinerary:
    from .numerics import BudgetExceeded

    n = walk.length
    if n > max_steps:
        raise BudgetExceeded(f"itinerary has {n} steps")
    steps = []
    for g in range(n):
        tps = walk.turn_visits.get(g)
        if tps:
            steps.append(Step(walk.link_at(g), "turn", max(t.level for t in tps)))
        else:
            steps.append(Step(walk.link_at(g), "straight"))
    return LinkItinerary(tuple(steps))


def itinerary_csv(itin: LinkItinerary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "linkIndex", "kind", "pPointLevel"])
    for i, st in enumerate(itin.steps, start=1):
        w.writerow([i, st.link, st.kind, "" if st.level is None else st.level])
    return buf.getvalue()


# -- link-symmetric arcs ------------------------------------------------------------


@dataclass(frozen=True)
class LinkSymmetricArc:
    center_visit: int
    center_arc_index: int
    radius: int  # in link visits
    truncated_at_alpha: bool
    truncated_at_end: bool

    @property
    def maximal(self) -> bool:
        return not self.truncated_at_end

    @property
    def span(self) -> tuple[int, int]:
        return self.center_visit - self.radius, self.center_visit + self.radius

    def contains_visit(self, g: int) -> bool:
        lo, hi = self.span
        return lo <= g <= hi

    def interior_visit(self, g: int) -> bool:
        lo, hi = self.span
        return lo < g < hi


def _symmetric_radius(walk: LinkWalk, g0: int) -> tuple[int, bool, bool]:
    left_lim, right_lim = g0, walk.length - 1 - g0
    lim = min(left_lim, right_lim)
    knot_g = [g for g, _ in walk.knots]
    cuts = {0, lim}
    for g in knot_g:
        if g > g0 and g - g0 < lim:
            cuts.add(g - g0)
        if g < g0 and g0 - g < lim:
            cuts.add(g0 - g)
    pts = sorted(cuts)
    for a, b in zip(pts, pts[1:]):
        ra, la = walk.link_at(g0 + a), walk.link_at(g0 - a)
        if ra != la:
            return a - 1, False, False
        rs = walk.link_at(g0 + a + 1) - ra
        ls = walk.link_at(g0 - a - 1) - la
        if rs != ls:
            return a, False, False
        # equal values and equal unit slopes: identical on [a, b]
    return lim, left_lim <= right_lim, right_lim <= left_lim


def max_link_symmetric_arc(walk: LinkWalk, center_visit: int) -> LinkSymmetricArc:
    if not walk.is_turn(center_visit):
        raise NotATurn(f"visit {center_visit} contains no turning p-point")
    r, at_alpha, at_end = _symmetric_radius(walk, center_visit)
    top = max(walk.turn_visits[center_visit], key=lambda t: t.level)
    return LinkSymmetricArc(center_visit, top.arc_index, r, at_alpha, at_end)


def _walk_for(tent: TentMap, p: int, depth: int, center_level: int) -> tuple[LinkWalk, LinkSymmetricArc]:
    """Grow the segment until the arc around s_{center_level} stops short of its end."""
    while True:
        walk = link_walk(tent, p, depth)
        arc = max_link_symmetric_arc(walk, walk.snappy_visits()[center_level])
        if not arc.truncated_at_end:
            return walk, arc
        depth += 1


@dataclass(frozen=True)
class SnappyCountReport:
    i: int
    p: int
    kappa: int
    count: int
    members: tuple[int, ...]
    expected: tuple[int, ...]
    interior_ok: bool
    depth: int
    radius: int
    truncated_at_alpha: bool

    @property
    def ok(self) -> bool:
        return self.count == self.kappa and self.members == self.expected and self.interior_ok


def _check_width(tent: TentMap, p: int, epsilon) -> None:
    if epsilon is not None and not width_bound(tent, p) < epsilon:
        raise ChainTooCoarse(
            f"width bound {format_scalar(width_bound(tent, p))} is not below epsilon {format_scalar(epsilon)}"
        )


def snappy_count(tent: TentMap, p: int, i: int, epsilon=None, depth: int | None = None) -> SnappyCountReport:
    """Snappy p-points inside the maximal p-link-symmetric arc A_i centred at s_i.

    ``epsilon`` enforces width(C_p) < epsilon through the rigorous width
    bound; pass None to skip the check (periodic slopes have no epsilon).
    """
    kappa = tent.compute_kappa()
    if i < kappa - 1:
        raise IndexTooSmall(f"i = {i} < kappa - 1 = {kappa - 1}")
    _check_width(tent, p, epsilon)
    walk, arc = _walk_for(tent, p, depth if depth is not None else i + 1, i)
    sv = walk.snappy_visits()
    members = tuple(sorted(j for j, g in sv.items() if arc.contains_visit(g)))
    first = i - kappa + 2
    expected = tuple(range(first, i + 2))
    interior = first in sv and arc.interior_visit(sv[first])
    return SnappyCountReport(
        i, p, kappa, len(members), members, expected, interior, walk.segment.depth, arc.radius, arc.truncated_at_alpha
    )


@dataclass(frozen=True)
class OffCenterReport:
    i: int
    y_arc_index: int
    count: int
    contained: bool

    @property
    def ok(self) -> bool:
        return self.count <= 1 and self.contained


def admissible_off_centers(walk: LinkWalk, i: int) -> list[int]:
    """Arc indices of turning p-points strictly between s_{i-1} and s_i outside their visits."""
    sv = walk.snappy_visits()
    g_prev, g_cur = sv[i - 1], sv[i]
    idx_prev = walk.segment.snappy()[i - 2].arc_index
    idx_cur = walk.segment.snappy()[i - 1].arc_index
    out = []
    for t in walk.turns:
        if idx_prev < t.arc_index < idx_cur and t.visit not in (g_prev, g_cur):
            top = max(walk.turn_visits[t.visit], key=lambda u: u.level)
            if top.arc_index == t.arc_index:
                out.append(t.arc_index)
    return out


def off_center_snappy_bound(
    tent: TentMap, p: int, i: int, y_arc_index: int | None = None, epsilon=None, depth: int | None = None
) -> list[OffCenterReport]:
    """Maximal link-symmetric arcs around off-centre points y between s_{i-1} and s_i.

    With ``y_arc_index`` only that point is checked (BadCenter if inadmissible);
    otherwise every admissible y is.
    """
    kappa = tent.compute_kappa()
    if i <= kappa - 1:
        raise IndexTooSmall(f"i = {i} must exceed kappa - 1 = {kappa - 1}")
    _check_width(tent, p, epsilon)
    walk, arc_i = _walk_for(tent, p, depth if depth is not None else i + 1, i)
    ys = admissible_off_centers(walk, i)
    if y_arc_index is not None:
        if y_arc_index not in ys:
            raise BadCenter(f"p-point {y_arc_index} is not an admissible off-centre point")
        ys = [y_arc_index]
    sv = walk.snappy_visits()
    lo_i, hi_i = arc_i.span
    out = []
    for y in ys:
        arc = max_link_symmetric_arc(walk, walk.visit_of(y))
        if arc.truncated_at_end:
            raise RuntimeError("segment too short for an off-centre arc inside A_i")
        lo, hi = arc.span
        count = sum(1 for g in sv.values() if lo <= g <= hi)
        out.append(OffCenterReport(i, y, count, lo_i <= lo and hi <= hi_i))
    return out
