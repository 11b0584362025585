"""The tent map T_s(x) = min(sx, s(1-x)), its critical orbit and precritical points."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .numerics import (
    DEFAULT_BIT_BUDGET,
    BudgetExceeded,
    Ordering,
    check_budget,
    compare,
    format_scalar,
)

__all__ = [
    "DomainError",
    "NotFoundWithinBound",
    "PrecriticalPoint",
    "PreperiodicReport",
    "TentMap",
    "HALF",
]

HALF = Fraction(1, 2)
DEFAULT_MAX_POINTS = 4_000_000


class DomainError(ValueError):
    pass


class NotFoundWithinBound(LookupError):
    pass


class PrecriticalPoint(NamedTuple):
    x: object
    order: int


class PreperiodicReport(NamedTuple):
    """``found`` with the witness pair ``c_i == c_j`` (c_0 = c), else a bounded negative."""

    found: bool
    i: int | None
    j: int | None
    depth: int

    def __str__(self) -> str:
        if self.found:
            return f"yes({self.i},{self.j})"
        return f"noWitnessUpTo({self.depth})"


@dataclass(frozen=True, eq=False)
class TentMap:
    """Tent map with slope ``1 < s <= 2`` and critical point c = 1/2.

    The critical orbit and the sorted precritical sets are cached lazily; the
    object is otherwise immutable.
    """

    slope: object
    bit_budget: int = DEFAULT_BIT_BUDGET
    max_points: int = DEFAULT_MAX_POINTS
    _orbit: list = field(default_factory=list, repr=False, compare=False)
    _pre: list = field(default_factory=list, repr=False, compare=False)
    _count_memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        s = self.slope
        if not (s > 1 and s <= 2):
            raise DomainError(f"slope must satisfy 1 < s <= 2, got {format_scalar(s)}")
        self._orbit.append(HALF)

    def __repr__(self) -> str:
        return f"TentMap(slope={format_scalar(self.slope)})"

    # -- constants -------------------------------------------------------

    @property
    def c(self) -> Fraction:
        return HALF

    @property
    def c1(self):
        return self.orbit(1)[1]

    @property
    def c2(self):
        return self.orbit(2)[2]

    def kappa(self, bound: int = 500) -> int:
        return self.compute_kappa(bound)

    # -- the map ---------------------------------------------------------

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        if compare(x, 0) is Ordering.LT or compare(x, 1) is Ordering.GT:
            raise DomainError(f"x = {format_scalar(x)} lies outside [0, 1]")
        s = self.slope
        if compare(x, HALF) is Ordering.GT:
            return s * (1 - x)
        return s * x

    def iterate(self, x, n: int):
        for _ in range(n):
            x = check_budget(self.eval(x), self.bit_budget)
        return x

    def orbit(self, n: int) -> list:
        """``[c_0, c_1, ..., c_n]`` with c_0 = c (shared cache, do not mutate)."""
        orb = self._orbit
        while len(orb) <= n:
            orb.append(check_budget(self.eval(orb[-1]), self.bit_budget))
        return orb

    def critical_orbit(self, n: int) -> list:
        """``[c_1, ..., c_n]``."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return list(self.orbit(n)[1 : n + 1])

    def compute_kappa(self, bound: int = 500) -> int:
        """Smallest ``i >= 3`` with ``c_i >= c``."""
        if bound < 3:
            raise ValueError("bound must be >= 3")
        orb = self.orbit(bound)
        for i in range(3, bound + 1):
            if orb[i] >= HALF:
                return i
        raise NotFoundWithinBound(f"no c_i >= c for 3 <= i <= {bound}")

    def preimages(self, y) -> list:
        """``T^{-1}(y)`` in [0, 1], sorted; the maximum c_1 has the single preimage c."""
        if y < 0 or y > self.c1:
            raise DomainError(f"y = {format_scalar(y)} lies outside [0, c1]")
        left = y / self.slope
        right = 1 - left
        if left == right:
            return [left]
        return [left, right]

    def is_preperiodic(self, depth: int) -> PreperiodicReport:
        """Search for ``c_i == c_j`` with ``i < j <= depth`` (minimal j first)."""
        if depth < 2:
            raise ValueError("depth must be >= 2")
        orb = self.orbit(depth)
        seen: dict = {}
        for j in range(depth + 1):
            v = orb[j]
            try:
                if v in seen:
                    return PreperiodicReport(True, seen[v], j, depth)
                seen[v] = j
            except TypeError:  # unhashable interval scalars
                for i in range(j):
                    if orb[i] == v:
                        return PreperiodicReport(True, i, j, depth)
        return PreperiodicReport(False, None, None, depth)

    def precritical_order(self, x, max_order: int) -> int | None:
        """Minimal ``i <= max_order`` with ``T^i(x) = c``, or None."""
        for i in range(max_order + 1):
            if x == HALF:
                return i
            if i < max_order:
                x = self.eval(x)
        return None

    # -- precritical sets -------------------------------------------------

    def precritical_sequence(self, order: int) -> list[PrecriticalPoint]:
        """Sorted ``S_order ∩ [0, c1]`` with minimal orders, S_k = ∪_{i<=k} T^{-i}(c).

        Built level by level: the left branch maps the previous sequence by
        y -> y/s, the right branch maps its part above c_2 by y -> 1 - y/s,
        so no sorting is ever needed.
        """
        if order < 0:
            raise ValueError("order must be >= 0")
        pre = self._pre
        if not pre:
            pre.append([PrecriticalPoint(HALF, 0)])
        while len(pre) <= order:
            pre.append(self._lift(pre[-1], full=False))
        return pre[order]

    def _lift(self, prev: Sequence[PrecriticalPoint], full: bool) -> list[PrecriticalPoint]:
        s, c1, c2 = self.slope, self.c1, self.c2
        budget = self.bit_budget
        size = 2 * len(prev) + 1
        if size > self.max_points:
            raise BudgetExceeded(f"precritical enumeration would hold {size} points")
        left = []
        right = []
        for y, o in prev:
            if y == c1:
                continue
            x = check_budget(y / s, budget)
            left.append(PrecriticalPoint(x, o + 1))
            if full or y >= c2:
                right.append(PrecriticalPoint(1 - x, o + 1))
        right.reverse()
        return left + [PrecriticalPoint(HALF, 0)] + right

    def precritical_points(self, max_order: int, window: tuple | None = None) -> list[PrecriticalPoint]:
        """All x in ``window`` (default [0, c1]) with minimal order <= max_order, ascending."""
        if max_order < 0:
            raise ValueError("max_order must be >= 0")
        lo, hi = window if window is not None else (Fraction(0), self.c1)
        if lo < 0 or hi > 1 or hi < lo:
            raise DomainError("window must be a subinterval of [0, 1]")
        if window is not None and len(self._pre) <= max_order and hi - lo < Fraction(1, 8):
            return self._window(max_order, lo, hi, [0])
        if hi <= self.c1 or max_order == 0:
            seq = self.precritical_sequence(max_order)
        else:
            seq = self._lift(self.precritical_sequence(max_order - 1), full=True)
        xs = [pt.x for pt in seq]
        i = bisect.bisect_left(xs, lo)
        j = bisect.bisect_right(xs, hi)
        return list(seq[i:j])

    def _window(self, k: int, lo, hi, seen: list) -> list[PrecriticalPoint]:
        """Points of S_k in [lo, hi] by pulling the window back through both branches."""
        out: list[PrecriticalPoint] = []
        if hi < lo:
            return out
        s, c1 = self.slope, self.c1
        if k >= 1:
            a, b = lo, min(hi, HALF)
            if a <= b:
                for y, o in self._window(k - 1, s * a, s * b, seen):
                    if y != c1:
                        out.append(PrecriticalPoint(check_budget(y / s, self.bit_budget), o + 1))
        if lo <= HALF <= hi:
            out.append(PrecriticalPoint(HALF, 0))
        if k >= 1:
            a, b = max(lo, HALF), hi
            if a <= b:
                right = self._window(k - 1, s * (1 - b), s * (1 - a), seen)
                for y, o in reversed(right):
                    if y != c1:
                        out.append(PrecriticalPoint(check_budget(1 - y / s, self.bit_budget), o + 1))
        seen[0] += len(out)
        if seen[0] > self.max_points:
            raise BudgetExceeded("windowed precritical enumeration exceeded the point budget")
        return out

    # -- counting without enumeration ------------------------------------

    def count_precritical_below(self, k: int, v) -> int:
        """``|S_k ∩ [0, v)|`` for v in [0, 1], in O(k) exact steps.

        Uses F_k(v) = F_{k-1}(sv) for v <= c and
        F_k(v) = 1 + 2 F_{k-1}(c1) - F_{k-1}(T v) - [T v in S_{k-1}] for v > c.
        """
        if k < 0:
            raise ValueError("k must be >= 0")
        path = [v]
        for _ in range(k):
            path.append(check_budget(self.eval(path[-1]), self.bit_budget))
        # hit[m] = smallest t >= 0 with path[m + t] == c (within the path), else None
        hit: list[int | None] = [None] * (k + 1)
        nxt = None
        for m in range(k, -1, -1):
            if path[m] == HALF:
                nxt = m
            hit[m] = None if nxt is None else nxt - m
        count = 1 if path[k] > HALF else 0
        for m in range(k - 1, -1, -1):
            level = k - m  # count is F_{level-1}(path[m+1]); produce F_level(path[m])
            x = path[m]
            if x > HALF:
                tv_in = hit[m + 1] is not None and hit[m + 1] <= level - 1
                count = 1 + 2 * self._total_below_c1(level - 1) - count - (1 if tv_in else 0)
            # else F_level(x) = F_{level-1}(s x) which is the current count
        return count

    def _total_below_c1(self, k: int) -> int:
        """``F_k(c1)`` memoised along the critical orbit."""
        memo = self._count_memo
        if k not in memo:
            memo[k] = self.count_precritical_below(k, self.c1) if k > 0 else (1 if self.c1 > HALF else 0)
        return memo[k]

    def precritical_count(self, k: int) -> int:
        """``|S_k ∩ [0, c1]|``."""
        extra = 1 if self.precritical_order(self.c1, k) is not None else 0
        return self._total_below_c1(k) + extra

    def orbit_count(self, k: int, i: int) -> int:
        """``F_k(c_i) = |S_k ∩ [0, c_i)|`` memoised over the critical orbit."""
        memo = self._count_memo
        key = ("orb", k, i)
        if key in memo:
            return memo[key]
        # unwind iteratively to keep recursion shallow
        stack = [(k, i)]
        while stack:
            kk, ii = stack[-1]
            kkey = ("orb", kk, ii)
            if kkey in memo:
                stack.pop()
                continue
            v = self.orbit(ii)[ii]
            if kk == 0:
                memo[kkey] = 1 if v > HALF else 0
                stack.pop()
                continue
            need = [(kk - 1, ii + 1)]
            if v > HALF:
                need.append((kk - 1, 1))
            missing = [n for n in need if ("orb", *n) not in memo]
            if missing:
                stack.extend(missing)
                continue
            below = memo[("orb", kk - 1, ii + 1)]
            if v > HALF:
                hit = 1 if self.orbit_hits_c(ii + 1, kk - 1) else 0
                memo[kkey] = 1 + 2 * memo[("orb", kk - 1, 1)] - below - hit
            else:
                memo[kkey] = below
            stack.pop()
        return memo[key]

    def orbit_hits_c(self, i: int, k: int) -> bool:
        """Whether ``c_i`` lies in S_k, i.e. ``c_{i+t} = c`` for some ``0 <= t <= k``."""
        orb = self.orbit(i + k)
        return any(orb[i + t] == HALF for t in range(k + 1))
