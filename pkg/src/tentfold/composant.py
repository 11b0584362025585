"""Symbolic picture of the ray from the endpoint alpha: p-points, levels, folding patterns."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .numerics import format_scalar
from .tentmap import HALF, TentMap

__all__ = [
    "STAR",
    "Star",
    "Level",
    "InvalidProjection",
    "PPoint",
    "FoldingPattern",
    "RaySegment",
    "ray_segment",
    "folding_pattern",
    "snappy_points",
    "arc_length",
    "shift",
    "p_symmetric_arc",
    "palindrome_radius",
    "SymmetricRadius",
]


class Star:
    """The conventional level of alpha; deliberately not an integer."""

    _instance: Star | None = None

    def __new__(cls) -> Star:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "*"

    __str__ = __repr__

    def __reduce__(self):
        return (Star, ())


STAR = Star()
Level = Union[int, Star]


class InvalidProjection(ValueError):
    pass


@dataclass(frozen=True)
class PPoint:
    arc_index: int  # 1-based, alpha is index 1
    level: Level
    position: object  # projection pi_{p+depth}, in [0, c1]
    snappy: bool = False


@dataclass(frozen=True)
class FoldingPattern:
    slope: object
    depth: int
    entries: tuple

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self) -> Iterator:
        return iter(self.entries)

    def snappy_indices(self) -> list[int]:
        """1-based indices (alpha = 1) of the first occurrences of levels 1, 2, ..."""
        out = []
        best = 0
        for idx, e in enumerate(self.entries, start=1):
            if e is not STAR and e > best:
                best = e
                out.append(idx)
        return out

    def to_json(self) -> dict:
        return {
            "slope": format_scalar(self.slope),
            "depth": self.depth,
            "entries": ["*" if e is STAR else e for e in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: dict | str) -> FoldingPattern:
        from .numerics import parse_scalar

        if isinstance(doc, str):
            doc = json.loads(doc)
        entries = tuple(STAR if e == "*" else int(e) for e in doc["entries"])
        return cls(parse_scalar(doc["slope"]), int(doc["depth"]), entries)


@dataclass(frozen=True)
class RaySegment:
    """The arc [alpha, s_{depth+1}] at scale p, positions under pi_{p+depth}."""

    tent: TentMap
    depth: int
    p: int
    points: tuple[PPoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def levels(self) -> list[Level]:
        return [pt.level for pt in self.points]

    def point(self, arc_index: int) -> PPoint:
        return self.points[arc_index - 1]

    def snappy(self) -> list[PPoint]:
        return [pt for pt in self.points if pt.snappy]

    def level_in_base(self, pt: PPoint, base_p: int) -> Level:
        """Level of ``pt`` measured at scale ``base_p`` instead of ``self.p``."""
        if pt.level is STAR:
            return STAR
        lvl = pt.level + self.p - base_p
        if lvl < 0:
            raise ValueError(f"point is not a {base_p}-point")
        return lvl


def ray_segment(tent: TentMap, j: int, p: int = 0) -> RaySegment:
    """p-points of [alpha, s_{j+1}] via the folding pattern of T^j on [0, c1]."""
    if j < 0 or p < 0:
        raise ValueError("j and p must be nonnegative")
    c1 = tent.c1
    pts: list[PPoint] = [PPoint(1, STAR, Fraction(0), False)]
    best = 0
    for x, order in tent.precritical_sequence(j):
        if x == c1:
            continue  # periodic case: c1 itself is precritical; the endpoint rule overrides
        lvl = j - order
        snappy = lvl > best
        if snappy:
            best = lvl
        pts.append(PPoint(len(pts) + 1, lvl, x, snappy))
    pts.append(PPoint(len(pts) + 1, j + 1, c1, j + 1 > best))
    return RaySegment(tent, j, p, tuple(pts))


def folding_pattern(tent: TentMap, count: int, max_depth: int | None = None) -> FoldingPattern:
    """First ``count`` entries of FP; the segment depth grows until enough entries exist."""
    if count < 1:
        raise ValueError("count must be >= 1")
    j = 0
    while True:
        seg = ray_segment(tent, j)
        if len(seg) >= count:
            return FoldingPattern(tent.slope, j, tuple(seg.levels[:count]))
        j += 1
        if max_depth is not None and j > max_depth:
            from .numerics import BudgetExceeded

            raise BudgetExceeded(f"{count} entries need segment depth > {max_depth}")


def snappy_points(tent: TentMap, p: int, count: int) -> list[PPoint]:
    """s_1, ..., s_count; s_i has level i and is the endpoint of the depth i-1 segment."""
    if count < 1:
        raise ValueError("count must be >= 1")
    seg = ray_segment(tent, count - 1, p)
    out = seg.snappy()
    assert [pt.level for pt in out] == list(range(1, count + 1))
    return out


def arc_length(seg: RaySegment, z: PPoint):
    """d-bar(alpha, z) = s^{p+depth} * position; pi_{p+depth} is injective on the segment."""
    if not (1 <= z.arc_index <= len(seg.points)) or seg.points[z.arc_index - 1] != z:
        raise InvalidProjection("point does not belong to this segment")
    return seg.tent.slope ** (seg.p + seg.depth) * z.position


def shift(seg: RaySegment, r: int) -> RaySegment:
    """Image under sigma^r: same levels at scale p + r, arc lengths multiplied by s^r."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return seg
    return replace(seg, p=seg.p + r)


@dataclass(frozen=True)
class SymmetricRadius:
    center: int  # 1-based arc index
    radius: int
    truncated_at_alpha: bool
    truncated_at_end: bool


def palindrome_radius(levels: Sequence[Level], center: int) -> SymmetricRadius:
    """Largest r with levels[center-k] == levels[center+k] for k <= r (1-based center)."""
    n = len(levels)
    if not 1 <= center <= n:
        raise IndexError("center out of range")
    i = center - 1
    r = 0
    while i - r - 1 >= 0 and i + r + 1 < n:
        a, b = levels[i - r - 1], levels[i + r + 1]
        if a is STAR or b is STAR or a != b:
            break
        r += 1
    left = i - r - 1
    at_alpha = left < 0 or levels[left] is STAR
    return SymmetricRadius(center, r, at_alpha, i + r + 1 >= n)


def p_symmetric_arc(seg: RaySegment, center_idx: int) -> SymmetricRadius:
    """Maximal p-symmetric radius (in p-points) around the point with arc index ``center_idx``.

    Endpoints at equal levels project to the same c_L, so matching levels is enough.
    """
    return palindrome_radius(seg.levels, center_idx)
