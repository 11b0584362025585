"""Certified scalar arithmetic.

Three kinds of scalars flow through the library:

* :class:`fractions.Fraction` for rational slopes,
* :class:`QuadraticNumber` for elements ``a + b*sqrt(d)`` of a real quadratic field,
* :class:`LazyReal` for adaptive-precision dyadic intervals.

All three support the ordinary arithmetic and comparison operators, so the
dynamics code is written once against plain operators.  Every comparison is
certified: exact forms are compared exactly and interval forms refine their
precision until the answer is decided or the precision cap is hit.
"""

from __future__ import annotations

import enum
import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Union

__all__ = [
    "ArithmeticBudgetError",
    "BudgetExceeded",
    "DEFAULT_BIT_BUDGET",
    "DEFAULT_PRECISION_CAP",
    "DivisionByZero",
    "LazyReal",
    "Ordering",
    "PrecisionExhausted",
    "QuadraticNumber",
    "Scalar",
    "SlopeParseError",
    "arith",
    "bit_size",
    "check_budget",
    "compare",
    "format_scalar",
    "parse_scalar",
    "parse_slope",
    "rational_bounds",
    "squarefree_part",
    "to_lazy",
]

DEFAULT_PRECISION_CAP = 4096
DEFAULT_BIT_BUDGET = 200_000


class ArithmeticBudgetError(ArithmeticError):
    """Base class for numeric failures that must never be papered over."""


class PrecisionExhausted(ArithmeticBudgetError):
    """Interval comparison could not be decided within the precision cap."""


class BudgetExceeded(ArithmeticBudgetError):
    """An exact value (or an enumeration) outgrew its configured budget."""


class DivisionByZero(ZeroDivisionError):
    pass


class SlopeParseError(ValueError):
    pass


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(k, d)`` with ``n == k*k*d`` and ``d`` square-free."""
    if n <= 0:
        raise ValueError("squarefree_part expects a positive integer")
    k, d = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    d *= m
    return k, d


def _as_fraction(x: int | Fraction) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@total_ordering
class QuadraticNumber:
    """Exact element ``a + b*sqrt(d)`` of the real quadratic field Q(sqrt(d)).

    ``d`` is a square-free integer > 1.  Arithmetic with rationals is allowed
    in both directions; mixing two different fields raises ``ValueError``.
    Results whose irrational part cancels are returned as ``Fraction``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: int | Fraction, b: int | Fraction, d: int) -> None:
        if d <= 1 or squarefree_part(d)[0] != 1:
            raise ValueError(f"d must be a square-free integer > 1, got {d}")
        self.a = _as_fraction(a)
        self.b = _as_fraction(b)
        self.d = d

    @classmethod
    def _make(cls, a: Fraction, b: Fraction, d: int) -> "QuadraticNumber | Fraction":
        if b == 0:
            return a
        obj = cls.__new__(cls)
        obj.a, obj.b, obj.d = a, b, d
        return obj

    def _coerce(self, other) -> tuple[Fraction, Fraction] | None:
        if isinstance(other, QuadraticNumber):
            if other.d != self.d:
                raise ValueError(f"cannot mix Q(sqrt({self.d})) and Q(sqrt({other.d}))")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return _as_fraction(other), Fraction(0)
        return None

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.a!r}, {self.b!r}, {self.d})"

    def __str__(self) -> str:
        return format_scalar(self)

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.d))

    def __eq__(self, other) -> bool:
        pair = self._coerce(other) if isinstance(other, (int, Fraction, QuadraticNumber)) else None
        if pair is None:
            return NotImplemented
        return self.a == pair[0] and self.b == pair[1]

    def sign(self) -> int:
        a, b, d = self.a, self.b, self.d
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sa == sb or sa == 0:
            return sb
        if sb == 0:
            return sa
        # opposite signs: compare a^2 with b^2 d
        diff = a * a - b * b * d
        return sa if diff > 0 else sb

    def __lt__(self, other) -> bool:
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return _sign(QuadraticNumber._make(self.a - pair[0], self.b - pair[1], self.d)) < 0

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return QuadraticNumber._make(self.a + pair[0], self.b + pair[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber._make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return QuadraticNumber._make(self.a - pair[0], self.b - pair[1], self.d)

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return QuadraticNumber._make(pair[0] - self.a, pair[1] - self.b, self.d)

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a2, b2 = pair
        return QuadraticNumber._make(
            self.a * a2 + self.b * b2 * self.d, self.a * b2 + self.b * a2, self.d
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber | Fraction":
        return QuadraticNumber._make(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise DivisionByZero("division by zero in quadratic field")
        return QuadraticNumber._make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        if pair[1] == 0:
            if pair[0] == 0:
                raise DivisionByZero("division by zero")
            return QuadraticNumber._make(self.a / pair[0], self.b / pair[0], self.d)
        return self * QuadraticNumber._make(pair[0], pair[1], self.d).inverse()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return self.inverse() * QuadraticNumber._make(pair[0], pair[1], self.d)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self.inverse()) ** (-n)
        result: QuadraticNumber | Fraction = Fraction(1)
        base: QuadraticNumber | Fraction = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __float__(self) -> float:
        lo, hi = rational_bounds(self, 80)
        return float((lo + hi) / 2)


def _sign(x) -> int:
    if isinstance(x, QuadraticNumber):
        return x.sign()
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# Adaptive-precision intervals


def _floor_dyadic(x: Fraction, prec: int) -> Fraction:
    return Fraction(math.floor(x * (1 << prec)), 1 << prec)


def _ceil_dyadic(x: Fraction, prec: int) -> Fraction:
    return Fraction(math.ceil(x * (1 << prec)), 1 << prec)


def _isqrt_bounds(n: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Dyadic bounds on sqrt(n) with denominator 2**prec."""
    scaled = n * (1 << (2 * prec))
    lo = math.isqrt(math.floor(scaled))
    hi = lo if lo * lo == scaled else lo + 1
    return Fraction(lo, 1 << prec), Fraction(hi, 1 << prec)


def rational_bounds(x: "Scalar", prec: int = 64) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= x <= hi`` with ``hi - lo <= 2**-prec`` (roughly)."""
    if isinstance(x, (int, Fraction)):
        f = _as_fraction(x)
        return f, f
    if isinstance(x, QuadraticNumber):
        extra = max(8, abs(x.b).numerator.bit_length() - abs(x.b).denominator.bit_length() + 8)
        slo, shi = _isqrt_bounds(Fraction(x.d), prec + extra)
        if x.b >= 0:
            return x.a + x.b * slo, x.a + x.b * shi
        return x.a + x.b * shi, x.a + x.b * slo
    if isinstance(x, LazyReal):
        return x.enclosure(prec)
    raise TypeError(f"not a scalar: {x!r}")


@total_ordering
class LazyReal:
    """A real number given by outward-rounded dyadic enclosures at any precision.

    ``approx(prec)`` must return ``(lo, hi)`` with ``lo <= x <= hi`` and the
    width shrinking as ``prec`` grows.  When the value is known exactly (it was
    built from a rational or quadratic number by exact operations only) the
    exact form is carried along and used as the equality witness.
    """

    __slots__ = ("_approx", "exact", "cap", "_cache")

    def __init__(
        self,
        approx: Callable[[int], tuple[Fraction, Fraction]],
        exact: "Fraction | QuadraticNumber | None" = None,
        cap: int = DEFAULT_PRECISION_CAP,
    ) -> None:
        self._approx = approx
        self.exact = exact
        self.cap = cap
        self._cache: dict[int, tuple[Fraction, Fraction]] = {}

    @classmethod
    def from_exact(cls, x: "Fraction | int | QuadraticNumber", cap: int = DEFAULT_PRECISION_CAP) -> "LazyReal":
        if isinstance(x, int):
            x = Fraction(x)

        def approx(prec: int) -> tuple[Fraction, Fraction]:
            lo, hi = rational_bounds(x, prec + 2)
            return _floor_dyadic(lo, prec), _ceil_dyadic(hi, prec)

        return cls(approx, exact=x, cap=cap)

    def enclosure(self, prec: int) -> tuple[Fraction, Fraction]:
        got = self._cache.get(prec)
        if got is None:
            got = self._approx(prec)
            self._cache[prec] = got
        return got

    def __repr__(self) -> str:
        lo, hi = self.enclosure(53)
        return f"LazyReal([{float(lo)!r}, {float(hi)!r}], exact={self.exact!r})"

    def _combine(self, other, op: str) -> "LazyReal":
        o = to_lazy(other, self.cap)
        exact = None
        if self.exact is not None and o.exact is not None:
            exact = arith(self.exact, o.exact, op)

        def approx(prec: int) -> tuple[Fraction, Fraction]:
            work = prec + 8
            alo, ahi = self.enclosure(work)
            blo, bhi = o.enclosure(work)
            if op == "+":
                lo, hi = alo + blo, ahi + bhi
            elif op == "-":
                lo, hi = alo - bhi, ahi - blo
            elif op == "*":
                prods = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
                lo, hi = min(prods), max(prods)
            else:
                if blo <= 0 <= bhi:
                    # widen the divisor until it separates from zero
                    p = work
                    while blo <= 0 <= bhi:
                        p *= 2
                        if p > o.cap:
                            raise PrecisionExhausted("cannot certify a nonzero divisor")
                        blo, bhi = o.enclosure(p)
                quots = (alo / blo, alo / bhi, ahi / blo, ahi / bhi)
                lo, hi = min(quots), max(quots)
            return _floor_dyadic(lo, prec), _ceil_dyadic(hi, prec)

        return LazyReal(approx, exact=exact, cap=min(self.cap, o.cap))

    def __add__(self, other):
        return self._combine(other, "+")

    def __radd__(self, other):
        return to_lazy(other, self.cap)._combine(self, "+")

    def __sub__(self, other):
        return self._combine(other, "-")

    def __rsub__(self, other):
        return to_lazy(other, self.cap)._combine(self, "-")

    def __mul__(self, other):
        return self._combine(other, "*")

    def __rmul__(self, other):
        return to_lazy(other, self.cap)._combine(self, "*")

    def __truediv__(self, other):
        o = to_lazy(other, self.cap)
        if o.exact is not None and o.exact == 0:
            raise DivisionByZero("division by zero")
        return self._combine(o, "/")

    def __rtruediv__(self, other):
        return to_lazy(other, self.cap) / self

    def __neg__(self):
        return LazyReal.from_exact(0, self.cap) - self

    def __abs__(self):
        return -self if compare(self, 0) is Ordering.LT else self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result: LazyReal = LazyReal.from_exact(1, self.cap)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, (int, Fraction, QuadraticNumber, LazyReal)):
            return NotImplemented
        return compare(self, other) is Ordering.EQ

    def __lt__(self, other) -> bool:
        if not isinstance(other, (int, Fraction, QuadraticNumber, LazyReal)):
            return NotImplemented
        return compare(self, other) is Ordering.LT

    __hash__ = None  # type: ignore[assignment]

    def __float__(self) -> float:
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)


Scalar = Union[Fraction, QuadraticNumber, LazyReal]


def to_lazy(x, cap: int = DEFAULT_PRECISION_CAP) -> LazyReal:
    if isinstance(x, LazyReal):
        return x
    if isinstance(x, (int, Fraction, QuadraticNumber)):
        return LazyReal.from_exact(x, cap)
    raise TypeError(f"not a scalar: {x!r}")


def compare(a, b) -> Ordering:
    """Certified three-way comparison of two scalars."""
    if not isinstance(a, LazyReal) and not isinstance(b, LazyReal):
        return Ordering(_sign(a - b))
    la, lb = to_lazy(a), to_lazy(b)
    if la.exact is not None and lb.exact is not None:
        return compare(la.exact, lb.exact)
    cap = min(la.cap, lb.cap)
    prec = 64
    while prec <= cap:
        alo, ahi = la.enclosure(prec)
        blo, bhi = lb.enclosure(prec)
        if ahi < blo:
            return Ordering.LT
        if bhi < alo:
            return Ordering.GT
        prec *= 2
    raise PrecisionExhausted(
        f"intervals still overlap at {cap} bits and no exactness certificate exists"
    )


def arith(a, b, op: str):
    """Exact (or enclosing, in interval mode) ``a op b`` for op in + - * /."""
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        if not isinstance(b, LazyReal) and b == 0:
            raise DivisionByZero("division by zero")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def bit_size(x) -> int:
    """Largest numerator/denominator bit length carried by an exact scalar."""
    if isinstance(x, int):
        return x.bit_length()
    if isinstance(x, Fraction):
        return max(x.numerator.bit_length(), x.denominator.bit_length())
    if isinstance(x, QuadraticNumber):
        return max(bit_size(x.a), bit_size(x.b))
    return 0


def check_budget(x, budget: int):
    if budget and bit_size(x) > budget:
        raise BudgetExceeded(f"exact value needs {bit_size(x)} bits, budget is {budget}")
    return x


# ---------------------------------------------------------------------------
# Text forms


def format_scalar(x) -> str:
    """Exact string form: ``"169/289"``, ``"1/4+1/4*sqrt(5)"``."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, QuadraticNumber):
        b = x.b
        mag = abs(b)
        coef = "" if mag == 1 else f"{mag}*"
        sign = "+" if b > 0 else "-"
        if x.a == 0:
            return f"{'-' if b < 0 else ''}{coef}sqrt({x.d})"
        return f"{x.a}{sign}{coef}sqrt({x.d})"
    if isinstance(x, LazyReal):
        if x.exact is not None:
            return format_scalar(x.exact)
        lo, hi = x.enclosure(64)
        return f"[{lo},{hi}]"
    raise TypeError(f"not a scalar: {x!r}")


_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")
_DECIMAL = re.compile(r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*$")
_QUAD_TERM = re.compile(r"^(?P<a>[+-]?\d+(?:/\d+)?)?(?:(?P<sign>[+-])(?:(?P<b>\d+(?:/\d+)?)\*)?sqrt\((?P<d>\d+)\))?$")


def parse_scalar(text: str):
    """Inverse of :func:`format_scalar` for exact forms."""
    t = text.replace(" ", "")
    if _RATIONAL.match(t) or _DECIMAL.match(t):
        return Fraction(t)
    m = re.match(r"^(?P<neg>-)?(?:(?P<b>\d+(?:/\d+)?)\*)?sqrt\((?P<d>\d+)\)$", t)
    if m:
        b = Fraction(m.group("b") or 1) * (-1 if m.group("neg") else 1)
        return QuadraticNumber(0, b, int(m.group("d")))
    m = _QUAD_TERM.match(t)
    if m and m.group("d"):
        b = Fraction(m.group("b") or 1) * (-1 if m.group("sign") == "-" else 1)
        return QuadraticNumber(Fraction(m.group("a") or 0), b, int(m.group("d")))
    raise SlopeParseError(f"cannot parse scalar {text!r}")


def _quadratic_root_in_window(p: int, q: int, r: int):
    """The root of p x^2 + q x + r lying in (1, 2]."""
    if p == 0:
        if q == 0:
            raise SlopeParseError("degenerate polynomial")
        roots = [Fraction(-r, q)]
    else:
        disc = q * q - 4 * p * r
        if disc < 0:
            raise SlopeParseError("polynomial has no real roots")
        k, d = squarefree_part(disc) if disc > 0 else (0, 1)
        if d == 1:
            roots = [Fraction(-q + sg * k, 2 * p) for sg in (1, -1)]
        else:
            roots = [QuadraticNumber(Fraction(-q, 2 * p), Fraction(sg * k, 2 * p), d) for sg in (1, -1)]
    hits = [x for x in roots if x > 1 and x <= 2]
    if not hits:
        raise SlopeParseError(f"no root of {p}x^2{q:+}x{r:+} lies in (1, 2]")
    return hits[0]


def parse_slope(text: str):
    """Parse a slope under the shared grammar and check ``1 < s <= 2``.

    Accepted forms: ``a/b``, a decimal literal, ``golden``, ``sqrt2`` and
    ``quad:p,q,r`` (the root of p x^2 + q x + r in (1, 2]).
    """
    t = text.strip().lower()
    if t == "golden":
        s = QuadraticNumber(Fraction(1, 2), Fraction(1, 2), 5)
    elif t == "sqrt2":
        s = QuadraticNumber(0, 1, 2)
    elif t.startswith("quad:"):
        try:
            p, q, r = (int(v) for v in t[5:].split(","))
        except ValueError as exc:
            raise SlopeParseError(f"bad quad slope {text!r}") from exc
        s = _quadratic_root_in_window(p, q, r)
    elif _RATIONAL.match(t):
        num, den = _RATIONAL.match(t).groups()
        if int(den) == 0:
            raise SlopeParseError("zero denominator")
        s = Fraction(int(num), int(den))
    elif _DECIMAL.match(t):
        s = Fraction(t)
    else:
        raise SlopeParseError(f"cannot parse slope {text!r}")
    if not (s > 1 and s <= 2):
        raise SlopeParseError(f"slope must satisfy 1 < s <= 2, got {format_scalar(s)}")
    return s
