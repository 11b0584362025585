"""Renormalisation, the folding-pattern distinguisher, bridges and the shift action."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .composant import STAR, Level, PPoint, RaySegment, ray_segment
from .numerics import PrecisionExhausted, compare, format_scalar, Ordering
from .tentmap import TentMap

__all__ = [
    "UncertifiableBoundary",
    "ConjugacyViolation",
    "RenormStep",
    "renorm_index",
    "reduce_slope",
    "DistinguishReport",
    "distinguish",
    "Bridge",
    "BridgeDecomposition",
    "bridges",
    "bridge_decomposition",
    "ShiftActionReport",
    "shift_action_check",
]


class UncertifiableBoundary(ArithmeticError):
    pass


class ConjugacyViolation(AssertionError):
    pass


def renorm_index(s) -> int:
    """The n with 2^{1/2^n} < s <= 2^{1/2^{n-1}}, i.e. the least n >= 1 with s^{2^n} > 2."""
    if not (s > 1 and s <= 2):
        raise ValueError("slope must lie in (1, 2]")
    n, power = 1, s * s
    while True:
        try:
            if compare(power, 2) is Ordering.GT:
                return n
        except PrecisionExhausted as exc:
            raise UncertifiableBoundary(str(exc)) from exc
        power = power * power
        n += 1


@dataclass(frozen=True)
class RenormStep:
    n: int
    slope: object
    reduced_slope: object
    fixed_point: object  # s / (s + 1)
    samples_checked: int = 0

    def to_json(self) -> dict:
        return {
            "slope": format_scalar(self.slope),
            "n": self.n,
            "reducedSlope": format_scalar(self.reduced_slope),
            "fixedPoint": format_scalar(self.fixed_point),
            "conjugacySamples": self.samples_checked,
        }


def _conjugacy_samples(u, samples: int) -> int:
    """Check L(T_u^2(x)) = T_{u^2}(L(x)) on ``samples`` points of [p, c1]."""
    tu, tu2 = TentMap(u), TentMap(u * u)
    p = u / (u + 1)
    c1 = u / 2
    scale = (u * u / 2) / (c1 - p)

    def L(x):
        return (x - p) * scale

    for k in range(samples):
        x = p + (c1 - p) * Fraction(k, samples - 1)
        lhs = L(tu.eval(tu.eval(x)))
        rhs = tu2.eval(L(x))
        if lhs != rhs:
            raise ConjugacyViolation(f"conjugacy fails at x = {format_scalar(x)} for slope {format_scalar(u)}")
    return samples


def reduce_slope(s, samples: int = 50) -> RenormStep:
    """Square the slope n-1 times, certifying each affine conjugacy on sample points."""
    n = renorm_index(s)
    u = s
    checked = 0
    for _ in range(n - 1):
        checked += _conjugacy_samples(u, samples)
        u = u * u
    return RenormStep(n, s, u, s / (s + 1), checked)


@dataclass(frozen=True)
class DistinguishReport:
    a: object
    b: object
    first_discrepancy: int | None
    depth_used: int
    identical: bool = False
    renorm: tuple[int, int] = (1, 1)
    warnings: tuple[str, ...] = field(default=())

    @property
    def decided(self) -> bool:
        return self.identical or self.first_discrepancy is not None

    def to_json(self) -> dict:
        return {
            "a": format_scalar(self.a),
            "b": format_scalar(self.b),
            "firstDiscrepancy": self.first_discrepancy,
            "depthUsed": self.depth_used,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _preperiodic_warning(t: TentMap, depth: int) -> list[str]:
    rep = t.is_preperiodic(max(depth, 2))
    if rep.found:
        return [f"slope {format_scalar(t.slope)} has (pre)periodic c {rep}"]
    return []


def distinguish(s, s2, max_depth: int) -> DistinguishReport:
    """First 1-based FP index (alpha = 1) where the reduced slopes' patterns differ."""
    ra, rb = reduce_slope(s), reduce_slope(s2)
    if ra.n != rb.n:
        ua, ub = s, s2  # different renormalisation depth already separates them
    else:
        ua, ub = ra.reduced_slope, rb.reduced_slope
    if ua == ub:
        return DistinguishReport(s, s2, None, 0, True, (ra.n, rb.n))
    ta, tb = TentMap(ua), TentMap(ub)
    warnings = tuple(_preperiodic_warning(ta, max_depth) + _preperiodic_warning(tb, max_depth))
    for j in range(max_depth + 1):
        la, lb = ray_segment(ta, j).levels, ray_segment(tb, j).levels
        for idx, (x, y) in enumerate(zip(la, lb), start=1):
            if x != y:
                return DistinguishReport(s, s2, idx, j, False, (ra.n, rb.n), warnings)
    return DistinguishReport(s, s2, None, max_depth, False, (ra.n, rb.n), warnings)


# -- bridges ------------------------------------------------------------------------


@dataclass(frozen=True)
class Bridge:
    q: int
    left: PPoint
    right: PPoint
    interior: tuple[int, ...]  # q-levels of interior q-points, all positive


@dataclass(frozen=True)
class BridgeDecomposition:
    q: int
    head: tuple[Level, ...]  # q-levels before the first level-0 q-point
    bridges: tuple[Bridge, ...]
    tail: tuple[int, ...]  # q-levels after the last level-0 q-point

    def concatenate(self) -> list[Level]:
        out: list[Level] = list(self.head)
        if self.bridges:
            out.append(0)
            for b in self.bridges:
                out.extend(b.interior)
                out.append(0)
        out.extend(self.tail)
        return out


def _q_points(seg: RaySegment, q: int) -> list[tuple[PPoint, Level]]:
    out: list[tuple[PPoint, Level]] = []
    for pt in seg.points:
        if pt.level is STAR:
            out.append((pt, STAR))
        elif pt.level + seg.p >= q:
            out.append((pt, pt.level + seg.p - q))
    return out


def bridge_decomposition(tent: TentMap, q: int, depth: int, p: int = 0) -> BridgeDecomposition:
    """Split the q-points of [alpha, s_{depth+1}] (levels measured from scale p) at q-level 0."""
    if q < p:
        raise ValueError("q must be at least the segment scale p")
    seg = ray_segment(tent, depth, p)
    qp = _q_points(seg, q)
    zeros = [k for k, (_, lvl) in enumerate(qp) if lvl == 0]
    if not zeros:
        return BridgeDecomposition(q, tuple(l for _, l in qp), (), ())
    head = tuple(l for _, l in qp[: zeros[0]])
    bs = []
    for a, b in zip(zeros, zeros[1:]):
        bs.append(Bridge(q, qp[a][0], qp[b][0], tuple(l for _, l in qp[a + 1 : b])))
    tail = tuple(l for _, l in qp[zeros[-1] + 1 :])
    return BridgeDecomposition(q, head, tuple(bs), tail)


def bridges(tent: TentMap, q: int, depth: int) -> list[Bridge]:
    return list(bridge_decomposition(tent, q, depth).bridges)


# -- the shift action -------------------------------------------------------------


@dataclass(frozen=True)
class ShiftActionReport:
    R: int
    depth: int
    snappy_shift: bool
    level_counts: bool
    bridges_preserved: bool
    details: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.snappy_shift and self.level_counts and self.bridges_preserved

    def to_json(self) -> dict:
        return {
            "R": self.R,
            "depth": self.depth,
            "snappyShift": self.snappy_shift,
            "levelCounts": self.level_counts,
            "bridgesPreserved": self.bridges_preserved,
            "details": list(self.details),
        }


def _between(seg: RaySegment, lo_idx: int, hi_idx: int, min_level: int = 0) -> Counter:
    return Counter(
        pt.level for pt in seg.points[lo_idx : hi_idx - 1] if pt.level is not STAR and pt.level >= min_level
    )


def shift_action_check(tent: TentMap, R: int, depth: int) -> ShiftActionReport:
    """Instantiate a homeomorphism as sigma^R and check how it acts on snappy points,
    inter-snappy level counts and bridges.

    sigma^R carries [alpha, s_{depth+1}] onto [alpha, s_{depth+R+1}], fixing
    projections and raising every p-level by R.
    """
    if R < 0:
        raise ValueError("R must be >= 0")
    if depth < R + 2:
        raise ValueError("depth must be at least R + 2")
    small = ray_segment(tent, depth)
    big = ray_segment(tent, depth + R)
    details: list[str] = []

    # (a) images of p-points: same position, level + R; s_i goes to s_{i+R}
    big_at = {pt.position: pt for pt in big.points if pt.level is not STAR and pt.level >= R}
    snappy_ok = len(big_at) == len(small.points) - 1
    for pt in small.points[1:]:
        img = big_at.get(pt.position)
        if img is None or img.level != pt.level + R:
            snappy_ok = False
            details.append(f"point {pt.arc_index} has no image at level {pt.level + R}")
            break
    sm_snappy = {pt.level: pt for pt in small.snappy()}
    bg_snappy = {pt.level: pt for pt in big.snappy()}
    for i, pt in sm_snappy.items():
        if bg_snappy.get(i + R) is None or bg_snappy[i + R].position != pt.position:
            snappy_ok = False
            details.append(f"s_{i} does not map to s_{i + R}")

    # (b) level counts strictly between consecutive snappy points
    counts_ok = True
    for i in range(1, depth + 1):
        a = _between(small, sm_snappy[i].arc_index, sm_snappy[i + 1].arc_index)
        b = _between(big, bg_snappy[i + R].arc_index, bg_snappy[i + R + 1].arc_index, min_level=R)
        if Counter({k + R: v for k, v in a.items()}) != b:
            counts_ok = False
            details.append(f"level counts differ between s_{i} and s_{i + 1}")

    # (c) p-bridges go to (p+R)-bridges, block by block between snappy points
    d0 = bridge_decomposition(tent, 0, depth)
    dR = bridge_decomposition(tent, R, depth + R)
    bridges_ok = [b.interior for b in d0.bridges] == [b.interior for b in dR.bridges]
    for i in range(1, depth + 1):
        lo, hi = sm_snappy[i].position, sm_snappy[i + 1].position
        n0 = sum(1 for b in d0.bridges if lo <= b.left.position and b.right.position <= hi)
        nR = sum(1 for b in dR.bridges if lo <= b.left.position and b.right.position <= hi)
        if n0 != nR:
            bridges_ok = False
            details.append(f"bridge counts differ between s_{i} and s_{i + 1}")
    if not bridges_ok and not details:
        details.append("bridge words differ")
    return ShiftActionReport(R, depth, snappy_ok, counts_ok, bridges_ok, tuple(details))
