"""Certified epsilon-symmetry tools and the parameter choices N0, N, delta, epsilon, r0."""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .numerics import BudgetExceeded, format_scalar
from .tentmap import HALF, DomainError, TentMap

__all__ = [
    "PLGraph",
    "ClosestPrecritical",
    "SymmetryParams",
    "Certificate",
    "PreperiodicSlope",
    "NotFound",
    "PeriodicityVerdict",
    "JdeltaResult",
    "ScanCase",
    "ScanReport",
    "max_asymmetry",
    "eps_periodic",
    "closest_precriticals",
    "find_n",
    "select_params",
    "verify_params",
    "jdelta",
    "asymmetry_scan",
    "scan_candidates",
    "left_precritical",
]


class PreperiodicSlope(ValueError):
    pass


class NotFound(LookupError):
    pass


def _interval(H) -> tuple:
    a, b = H
    if b < a:
        raise DomainError("interval endpoints out of order")
    if a < 0 or b > 1:
        raise DomainError("interval must lie in [0, 1]")
    return a, b


class PLGraph:
    """Exact graph of T^n on [lo, hi]: knots at the turning points, affine in between.

    A turning point of order i < n has value c_{n-i}, so only the endpoints
    need to be iterated.
    """

    def __init__(self, tent: TentMap, n: int, lo, hi) -> None:
        if n < 0:
            raise ValueError("n must be >= 0")
        self.tent, self.n = tent, n
        xs = [lo]
        ys = [tent.iterate(lo, n)]
        if n > 0 and hi > lo:
            orb = tent.orbit(n)
            for x, order in tent.precritical_points(n - 1, (lo, hi)):
                if x == lo or x == hi:
                    continue
                xs.append(x)
                ys.append(orb[n - order])
        if hi > lo:
            xs.append(hi)
            ys.append(tent.iterate(hi, n))
        self.xs, self.ys = xs, ys

    def __call__(self, y):
        xs, ys = self.xs, self.ys
        if y < xs[0] or y > xs[-1]:
            raise DomainError("point outside the graph's interval")
        k = bisect.bisect_right(xs, y) - 1
        if k >= len(xs) - 1:
            return ys[-1]
        if y == xs[k]:
            return ys[k]
        return ys[k] + (ys[k + 1] - ys[k]) * (y - xs[k]) / (xs[k + 1] - xs[k])

    @property
    def turning_points(self) -> list:
        return self.xs[1:-1]


def max_asymmetry(tent: TentMap, H, n: int):
    """``sup_t |T^n(a+t) - T^n(b-t)|`` over ``0 <= t <= b-a``, attained at a breakpoint."""
    a, b = _interval(H)
    g = PLGraph(tent, n, a, b)
    ts = {Fraction(0), b - a}
    for x in g.turning_points:
        ts.add(x - a)
        ts.add(b - x)
    return max(abs(g(a + t) - g(b - t)) for t in ts)


@dataclass(frozen=True)
class PeriodicityVerdict:
    periodic: bool
    sup: object
    witness: object | None = None  # smallest t attaining the sup when not periodic
    excess: object | None = None

    def __bool__(self) -> bool:
        return self.periodic


def eps_periodic(tent: TentMap, H, n: int, eta, epsilon) -> PeriodicityVerdict:
    """Is ``|T^n(t) - T^n(t+2eta)| < epsilon`` for all ``t, t+2eta`` in H?"""
    a, b = _interval(H)
    if eta <= 0:
        raise DomainError("eta must be positive")
    two = 2 * eta
    if two >= b - a:
        return PeriodicityVerdict(True, Fraction(0))
    g = PLGraph(tent, n, a, b)
    lo, hi = a, b - two
    ts = {lo, hi}
    for x in g.turning_points:
        if lo <= x <= hi:
            ts.add(x)
        if lo <= x - two <= hi:
            ts.add(x - two)
    best = None
    best_t = None
    for t in sorted(ts):
        v = abs(g(t) - g(t + two))
        if best is None or v > best:
            best, best_t = v, t
    if best < epsilon:
        return PeriodicityVerdict(True, best)
    return PeriodicityVerdict(False, best, best_t, best - epsilon)


# -- closest precritical points ---------------------------------------------


@dataclass(frozen=True)
class ClosestPrecritical:
    k: int
    z: object
    side: str = "right"

    @property
    def distance(self):
        return abs(self.z - HALF)

    def mirror(self) -> ClosestPrecritical:
        return ClosestPrecritical(self.k, 1 - self.z, "left" if self.side == "right" else "right")


def closest_precriticals(tent: TentMap, max_order: int) -> list[ClosestPrecritical]:
    """All admissible orders k <= max_order with their right-hand z_k.

    T^k is monotone on [c, c+t) where t is the distance to the nearest right
    precritical point of lower order; it hits c there iff it moves towards c.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    s = tent.slope
    orb = tent.orbit(max_order)
    reach = HALF  # [c, c + reach) carries no precritical point of order < k
    sign = -1  # sign of (T^k)' just right of c
    out: list[ClosestPrecritical] = []
    power = Fraction(1)
    for k in range(1, max_order + 1):
        power = power * s
        ck = orb[k]
        if ck == HALF:
            break  # periodic: c_k = c, no monotone branch can end at c
        towards = (sign > 0) == (ck < HALF)
        if towards:
            d = abs(ck - HALF) / power
            if d < reach:
                out.append(ClosestPrecritical(k, HALF + d))
                reach = d
        sign = sign * (1 if ck < HALF else -1)
    return out


def find_n(tent: TentMap, search_bound: int) -> list[ClosestPrecritical]:
    """Closest precritical z_N with theta_N > |z_N - c|, N <= search_bound."""
    rep = tent.is_preperiodic(max(search_bound, 2))
    if rep.found:
        raise PreperiodicSlope(f"c is (pre)periodic: {rep}")
    orb = tent.orbit(search_bound)
    out = []
    theta = None
    zs = {z.k: z for z in closest_precriticals(tent, search_bound)}
    for n in range(1, search_bound + 1):
        d = abs(orb[n] - HALF)
        theta = d if theta is None or d < theta else theta
        z = zs.get(n)
        if z is not None and theta > z.distance:
            out.append(z)
    return out


def left_precritical(tent: TentMap, j: int):
    """c_{-j}: the point left of c with T^j(c_{-j}) = c along the left branch."""
    return HALF / tent.slope**j


# -- parameters -----------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    name: str
    lhs: object
    rhs: object
    holds: bool

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": format_scalar(self.lhs), "rhs": format_scalar(self.rhs), "holds": self.holds}


@dataclass(frozen=True)
class SymmetryParams:
    slope: object
    N0: int
    N: int
    zN0: object
    zN: object
    delta: object
    epsilon: object
    r0: int
    theta: object
    kappa: int
    certificates: tuple[Certificate, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "slope": format_scalar(self.slope),
            "N0": self.N0,
            "N": self.N,
            "zN0": format_scalar(self.zN0),
            "zN": format_scalar(self.zN),
            "delta": format_scalar(self.delta),
            "epsilon": format_scalar(self.epsilon),
            "r0": self.r0,
            "theta": format_scalar(self.theta),
            "kappa": self.kappa,
            "certificates": [c.to_json() for c in self.certificates],
        }


def _ceil_log(s, target) -> int:
    """Smallest m >= 0 with s^m >= target."""
    m, power = 0, Fraction(1)
    while power < target:
        power = power * s
        m += 1
    return m


def _min_orbit_gap(tent: TentMap, upto: int):
    vals = sorted(tent.orbit(upto)[: upto + 1])
    return min(b - a for a, b in zip(vals, vals[1:]))


def _delta_cap(tent: TentMap, kappa: int):
    s = tent.slope
    cm1, cm2 = left_precritical(tent, 1), left_precritical(tent, 2)
    chat1 = 1 - s / 2
    c2k = left_precritical(tent, kappa - 2)
    return min(abs(cm1 - cm2), abs(cm1 - chat1), abs(tent.c2 - c2k)) / 30


def select_params(tent: TentMap, budget: int = 200) -> SymmetryParams:
    """Smallest admissible N0 with s^N0 > 100, then the smallest admissible N with delta below both caps."""
    s = tent.slope
    kappa = tent.compute_kappa(budget)
    cap = _delta_cap(tent, kappa)
    bound = min(32, budget)
    while True:
        admissible = find_n(tent, bound)
        n0 = next((z for z in admissible if s**z.k > 100), None)
        zn = None
        if n0 is not None:
            zn = next(
                (z for z in admissible if z.k > n0.k and 100 * z.distance < n0.distance and z.distance < cap),
                None,
            )
        if zn is not None:
            break
        if bound >= budget:
            raise BudgetExceeded(f"no admissible N0, N satisfying the delta bounds up to {budget}")
        bound = min(2 * bound, budget)
    delta = zn.distance
    m = _ceil_log(s, 1 / (22 * delta))
    r0 = -(-m // zn.k) + 1
    span = (2 + r0) * zn.k
    gap = _min_orbit_gap(tent, span)
    epsilon = min(gap, delta) / 2
    theta = min(abs(v - HALF) for v in tent.orbit(zn.k)[1 : zn.k + 1])
    params = SymmetryParams(s, n0.k, zn.k, n0.z, zn.z, delta, epsilon, r0, theta, kappa)
    certs = verify_params(tent, params)
    return SymmetryParams(s, n0.k, zn.k, n0.z, zn.z, delta, epsilon, r0, theta, kappa, tuple(certs))


def verify_params(tent: TentMap, params: SymmetryParams) -> list[Certificate]:
    """Re-derive every inequality from scratch by brute force over the orbit."""
    s = tent.slope
    N, N0 = params.N, params.N0
    orb = tent.orbit((2 + params.r0) * N)
    certs = [Certificate("s^N0 > 100", s**N0, Fraction(100), s**N0 > 100)]
    theta = min(abs(orb[i] - HALF) for i in range(1, N + 1))
    certs.append(Certificate("theta_N > |z_N - c|", theta, params.delta, theta > params.delta))
    d0 = abs(params.zN0 - HALF)
    certs.append(Certificate("delta < |z_N0 - c|/100", params.delta, d0 / 100, params.delta < d0 / 100))
    # z_N is a genuine closest precritical point: T^N maps [c, z_N] monotonically onto [c_N, c]
    g = PLGraph(tent, N, min(HALF, params.zN), max(HALF, params.zN))
    mono = not g.turning_points and g(params.zN) == HALF
    certs.append(Certificate("T^N monotone on [c, z_N] onto [c_N, c]", orb[N], g(HALF), mono and g(HALF) == orb[N]))
    span = (2 + params.r0) * N
    gap = min(abs(orb[i] - orb[j]) for i in range(span + 1) for j in range(i + 1, span + 1))
    certs.append(Certificate("epsilon < min |c_i - c_j|", params.epsilon, gap, params.epsilon < gap))
    certs.append(Certificate("epsilon < delta", params.epsilon, params.delta, params.epsilon < params.delta))
    cm1 = HALF / s
    cm2 = HALF / s**2
    c2k = HALF / s ** (params.kappa - 2)
    b4 = min(abs(cm1 - cm2), abs(cm1 - (1 - s / 2)), abs(tent.c2 - c2k)) / 30
    certs.append(Certificate("delta < min{...}/30", params.delta, b4, params.delta < b4))
    certs.append(
        Certificate(
            "s^((r0-1)N) * 22 delta >= 1",
            s ** ((params.r0 - 1) * N) * 22 * params.delta,
            Fraction(1),
            s ** ((params.r0 - 1) * N) * 22 * params.delta >= 1,
        )
    )
    return certs


# -- the monotone pullback ---------------------------------------------------------


@dataclass(frozen=True)
class JdeltaResult:
    l: int
    J: tuple
    shrinks: int


def _image(tent: TentMap, lo, hi, m: int) -> tuple:
    a, b = tent.iterate(lo, m), tent.iterate(hi, m)
    return (a, b) if a <= b else (b, a)


def jdelta(tent: TentMap, Jtilde, delta, max_iter: int = 10_000) -> JdeltaResult:
    """Concentric J inside Jtilde and l with T^l monotone on J and T^l(J) ⊇ [c-δ, c+δ].

    Starting from Jtilde, iterate until c enters the interior of the image;
    if the image misses [c-δ, c+δ], shrink symmetrically so that the preimage
    of c becomes a boundary point and keep iterating.
    """
    lo, hi = Jtilde
    if hi - lo < 22 * delta:
        raise ValueError("|Jtilde| must be at least 22*delta")
    if lo < 0 or hi > 1:
        raise DomainError("Jtilde must lie in [0, 1]")
    x = (lo + hi) / 2
    h = (hi - lo) / 2
    target_lo, target_hi = HALF - delta, HALF + delta
    shrinks = 0
    ya, yb = lo, hi  # T^m(lo), T^m(hi)
    for m in range(max_iter + 1):
        a, b = (ya, yb) if ya <= yb else (yb, ya)
        if a < HALF < b:
            if a <= target_lo and b >= target_hi:
                return JdeltaResult(m, (x - h, x + h), shrinks)
            # preimage of c in the current interval, via the affine branch
            w = (x - h) + (HALF - ya) * (2 * h) / (yb - ya)
            h = abs(w - x)
            shrinks += 1
            if 2 * h < 18 * delta:
                raise NotFound(f"interval shrank below 18*delta at iterate {m}")
            ya, yb = tent.iterate(x - h, m), tent.iterate(x + h, m)
        ya, yb = tent.eval(ya), tent.eval(yb)
    raise NotFound(f"no suitable iterate within {max_iter}")


# -- the asymmetry scan ------------------------------------------------------------


@dataclass(frozen=True)
class ScanCase:
    H: tuple
    n: int
    max_asymmetry: object
    passed: bool
    kind: str = "offcenter"

    def to_json(self) -> dict:
        return {
            "H": [format_scalar(self.H[0]), format_scalar(self.H[1])],
            "n": self.n,
            "maxAsymmetry": format_scalar(self.max_asymmetry),
            "pass": self.passed,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class ScanReport:
    slope: object
    delta: object
    epsilon: object
    n_max: int
    cases: tuple[ScanCase, ...]

    @property
    def counterexamples(self) -> list[ScanCase]:
        return [c for c in self.cases if not c.passed]

    @property
    def min_slack(self):
        return min(c.max_asymmetry - self.epsilon for c in self.cases)

    def to_json(self) -> dict:
        return {
            "slope": format_scalar(self.slope),
            "delta": format_scalar(self.delta),
            "epsilon": format_scalar(self.epsilon),
            "nMax": self.n_max,
            "minSlack": format_scalar(self.min_slack),
            "counterexamples": len(self.counterexamples),
            "cases": [c.to_json() for c in self.cases],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _rational_below(x, places: int = 12) -> Fraction:
    """A dyadic-free rational just below x, for exact grid construction."""
    if isinstance(x, Fraction):
        return x
    from .numerics import rational_bounds

    return rational_bounds(x, 4 * places)[0]


def is_off_centre(H, delta) -> bool:
    a, b = H
    x = (a + b) / 2
    return a <= HALF <= b and delta < min(abs(HALF - a), abs(HALF - b), abs(HALF - x))


def scan_candidates(tent: TentMap, delta, grid: int) -> list[tuple]:
    """``grid`` rational intervals inside [0, c1] with c inside and centre, ends both farther than delta from c."""
    c1 = _rational_below(tent.c1)
    d = _rational_below(delta)
    out: list[tuple] = []
    lo_off = 2 * d
    hi_off = (c1 - HALF) / 2
    ratios = (Fraction(5, 4), Fraction(2), Fraction(4))
    k = 0
    while len(out) < grid and k < 50 * grid:
        frac = Fraction(k % grid, max(grid - 1, 1))
        off = lo_off + (hi_off - lo_off) * frac * frac
        side = 1 if k % 2 == 0 else -1
        x = HALF + side * off
        h = off * ratios[k % 3] + 2 * d
        if side > 0:
            h = min(h, c1 - x)
        else:
            h = min(h, x)
        H = (x - h, x + h)
        if is_off_centre(H, delta) and H not in out:
            out.append(H)
        k += 1
    return out


def asymmetry_scan(
    tent: TentMap,
    params: SymmetryParams,
    n_max: int,
    grid: int,
    candidates: Iterable[tuple] | None = None,
    include_orbit_centres: bool = True,
) -> ScanReport:
    """Check maxAsymmetry(H, n) >= epsilon over sampled H and every n <= n_max.

    A failing case would falsify the implementation, not the underlying theorem.
    """
    Hs = list(candidates) if candidates is not None else scan_candidates(tent, params.delta, grid)
    Hs = [H for H in Hs if is_off_centre(H, params.delta)]
    cases: list[ScanCase] = []
    for H in Hs:
        for n in range(n_max + 1):
            v = max_asymmetry(tent, H, n)
            cases.append(ScanCase(H, n, v, v >= params.epsilon))
    if include_orbit_centres:
        half = 11 * params.delta
        orb = tent.orbit(2 * params.N)
        for k in range(1, 2 * params.N + 1):
            ck = orb[k]
            H = (ck - half, ck + half)
            if H[0] < 0 or H[1] > 1:
                continue
            for n in range(n_max + 1):
                v = max_asymmetry(tent, H, n)
                cases.append(ScanCase(H, n, v, v >= params.epsilon, kind=f"orbit:{k}"))
    return ScanReport(tent.slope, params.delta, params.epsilon, n_max, tuple(cases))
