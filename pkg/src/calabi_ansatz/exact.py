"""Exact scalars: rationals, the ln3 extension, (2*pi)-graded values, intervals.

Every constant produced by the Calabi-ansatz reduction lives in one of

* ``Fraction``                     -- plain rationals,
* :class:`Log3Linear`              -- ``a + b*ln3`` with rational ``a, b``,
* :class:`Log3Rational`            -- ratios of polynomials in ``ln3``,
* :class:`PiGraded`                -- one of the above times ``(2*pi)**p``,
* :class:`CertifiedInterval`       -- rational enclosure ``[lo, hi]``.

ln3 is transcendental, so equality of the exact types is decided structurally.
Signs of nonzero exact values are decided by refining enclosures until they
exclude zero, which always terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Union

from . import _densepoly as dp

Rational = Fraction

DEFAULT_WIDTH = Fraction(1, 10**30)


class DomainError(ArithmeticError):
    """Operation leaves the algebra it was asked to stay in."""


def as_rational(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Log3Linear) and x.b == 0:
        return x.a
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _is_rational_like(x: Any) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


# --------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class CertifiedInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Any) -> CertifiedInterval:
        x = as_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x: Any) -> bool:
        if isinstance(x, CertifiedInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = as_rational(x)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def sign(self) -> int | None:
        """+1 / -1 when the enclosure excludes zero, 0 for ``[0, 0]``, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 and self.hi == 0:
            return 0
        return None

    def round_out(self, width: Fraction) -> CertifiedInterval:
        """Outward rounding to a dyadic grid of spacing at most ``width / 4``."""
        if self.lo == self.hi:
            return self
        n = 0
        while Fraction(1, 2**n) > width / 4:
            n += 1
        den = 2**n
        lo = Fraction(math.floor(self.lo * den), den)
        hi = Fraction(math.ceil(self.hi * den), den)
        return CertifiedInterval(lo, hi)

    def enclose(self, width: Fraction = DEFAULT_WIDTH) -> CertifiedInterval:
        return self

    @staticmethod
    def _coerce(x: Any) -> CertifiedInterval:
        if isinstance(x, CertifiedInterval):
            return x
        if _is_rational_like(x):
            return CertifiedInterval.point(x)
        if isinstance(x, Log3Linear) and x.b == 0:
            return CertifiedInterval.point(x.a)
        raise TypeError(f"cannot mix CertifiedInterval with {type(x).__name__}")

    def __neg__(self) -> CertifiedInterval:
        return CertifiedInterval(-self.hi, -self.lo)

    def __add__(self, other: Any) -> CertifiedInterval:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return CertifiedInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other: Any) -> CertifiedInterval:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return CertifiedInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other: Any) -> CertifiedInterval:
        return (-self) + other

    def __mul__(self, other: Any) -> CertifiedInterval:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return CertifiedInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def reciprocal(self) -> CertifiedInterval:
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return CertifiedInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: Any) -> CertifiedInterval:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other: Any) -> CertifiedInterval:
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, n: int) -> CertifiedInterval:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self ** (-n)).reciprocal()
        if n == 0:
            return CertifiedInterval.point(1)
        a, b = self.lo**n, self.hi**n
        if n % 2 == 0 and self.lo < 0 < self.hi:
            return CertifiedInterval(Fraction(0), max(a, b))
        return CertifiedInterval(min(a, b), max(a, b))

    def __str__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def hull(*xs: CertifiedInterval) -> CertifiedInterval:
    return CertifiedInterval(min(x.lo for x in xs), max(x.hi for x in xs))


# --------------------------------------------------------------------------
# constants by series with explicit remainder bounds


class _AtanhSeries:
    """Partial sums of atanh(1/n) = sum 1/((2j+1) n^(2j+1))."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.sums = [Fraction(0)]

    def term(self, j: int) -> Fraction:
        return Fraction(1, (2 * j + 1) * self.n ** (2 * j + 1))

    def partial(self, count: int) -> Fraction:
        while len(self.sums) <= count:
            j = len(self.sums) - 1
            self.sums.append(self.sums[-1] + self.term(j))
        return self.sums[count]

    def tail_bound(self, count: int) -> Fraction:
        # ratio of consecutive terms is below 1/n^2
        return self.term(count) / (1 - Fraction(1, self.n**2))


class _AtanSeries:
    """Partial sums of atan(1/n); alternating, so consecutive sums bracket."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.sums = [Fraction(0)]

    def term(self, j: int) -> Fraction:
        return Fraction((-1) ** j, (2 * j + 1) * self.n ** (2 * j + 1))

    def partial(self, count: int) -> Fraction:
        while len(self.sums) <= count:
            j = len(self.sums) - 1
            self.sums.append(self.sums[-1] + self.term(j))
        return self.sums[count]

    def bracket(self, count: int) -> CertifiedInterval:
        a, b = self.partial(count), self.partial(count + 1)
        return CertifiedInterval(min(a, b), max(a, b))


_ATANH3 = _AtanhSeries(3)
_ATANH5 = _AtanhSeries(5)
_ATAN5 = _AtanSeries(5)
_ATAN239 = _AtanSeries(239)


@lru_cache(maxsize=256)
def _ln3_terms(count: int) -> CertifiedInterval:
    # ln3 = ln2 + ln(3/2) = 2 atanh(1/3) + 2 atanh(1/5)
    s = 2 * (_ATANH3.partial(count) + _ATANH5.partial(count))
    t = 2 * (_ATANH3.tail_bound(count) + _ATANH5.tail_bound(count))
    return CertifiedInterval(s, s + t)


def ln3_enclosure(width_bound: Any) -> CertifiedInterval:
    """Enclosure of ln 3 with width at most ``width_bound``.

    Refining the bound never leaves the previous enclosure: the term count is
    monotone in the bound and every partial-sum interval nests in the last.
    """
    w = as_rational(width_bound)
    if w <= 0:
        raise ValueError("width_bound must be positive")
    count = 1
    while _ln3_terms(count).width > w:
        count += 1
    return _ln3_terms(count)


@lru_cache(maxsize=256)
def _pi_terms(count: int) -> CertifiedInterval:
    return 16 * _ATAN5.bracket(count) - 4 * _ATAN239.bracket(count)


def pi_enclosure(width_bound: Any) -> CertifiedInterval:
    """Enclosure of pi (Machin's formula) with width at most ``width_bound``."""
    w = as_rational(width_bound)
    if w <= 0:
        raise ValueError("width_bound must be positive")
    count = 1
    while _pi_terms(count).width > w:
        count += 1
    return _pi_terms(count)


def log_enclosure(x: Any, width_bound: Any) -> CertifiedInterval:
    """Enclosure of ln(x) for rational x > 0 via 2*atanh((x-1)/(x+1))."""
    x = as_rational(x)
    w = as_rational(width_bound)
    if x <= 0:
        raise ValueError("log of a non-positive number")
    if x == 1:
        return CertifiedInterval.point(0)
    # pull out powers of 2 so the atanh series converges quickly
    n = 0
    while x > Fraction(3, 2):
        x /= 2
        n += 1
    while x < Fraction(3, 4):
        x *= 2
        n -= 1
    if n:
        ln2 = _atanh_log(Fraction(2), w / (2 * abs(n)))
        return n * ln2 + _atanh_log(x, w / 2)
    return _atanh_log(x, w)


def _atanh_log(x: Fraction, w: Fraction) -> CertifiedInterval:
    if x == 1:
        return CertifiedInterval.point(0)
    y = (x - 1) / (x + 1)
    ay, y2 = abs(y), y * y
    s = Fraction(0)
    j = 0
    while True:
        t = ay ** (2 * j + 1) / (2 * j + 1)
        tail = 2 * t / (1 - y2)
        if tail <= w:
            break
        s += t
        j += 1
    if y > 0:
        return CertifiedInterval(2 * s, 2 * s + tail)
    return CertifiedInterval(-2 * s - tail, -2 * s)


def _refine(build, width: Fraction) -> CertifiedInterval:
    """Tighten inner precision until ``build(inner)`` is narrow enough."""
    width = as_rational(width)
    if width <= 0:
        raise ValueError("width_bound must be positive")
    inner = width / 8
    for _ in range(200):
        iv = build(inner)
        if iv.width <= width / 2:
            return iv.round_out(width)
        inner /= 2**16
    raise ArithmeticError("enclosure failed to converge")  # pragma: no cover


# --------------------------------------------------------------------------
# Q + Q*ln3


class Log3Linear:
    """``a + b*ln3`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: Any = 0, b: Any = 0) -> None:
        object.__setattr__(self, "a", as_rational(a))
        object.__setattr__(self, "b", as_rational(b))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Log3Linear is immutable")

    @classmethod
    def ln3(cls) -> Log3Linear:
        return cls(0, 1)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self) -> str:
        return f"Log3Linear({self.a}, {self.b})"

    def __str__(self) -> str:
        return format_scalar(self)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Log3Linear):
            return self.a == other.a and self.b == other.b
        if _is_rational_like(other):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    @staticmethod
    def _coerce(x: Any) -> Log3Linear | None:
        if isinstance(x, Log3Linear):
            return x
        if _is_rational_like(x):
            return Log3Linear(x, 0)
        return None

    def __neg__(self) -> Log3Linear:
        return Log3Linear(-self.a, -self.b)

    def __add__(self, other: Any) -> Log3Linear:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Log3Linear(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other: Any) -> Log3Linear:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Log3Linear(self.a - o.a, self.b - o.b)

    def __rsub__(self, other: Any) -> Log3Linear:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> Log3Linear:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.b != 0 and o.b != 0:
            raise DomainError("ln3**2 term: product leaves Q + Q*ln3")
        return Log3Linear(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> Log3Linear:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.b != 0:
            raise DomainError("division by an irrational Log3Linear")
        if o.a == 0:
            raise ZeroDivisionError("division by zero")
        return Log3Linear(self.a / o.a, self.b / o.a)

    def __rtruediv__(self, other: Any) -> Any:
        return Log3Rational.coerce(other) / Log3Rational.coerce(self)

    def enclose(self, width: Any = DEFAULT_WIDTH) -> CertifiedInterval:
        if self.b == 0:
            return CertifiedInterval.point(self.a)
        return _refine(lambda w: self.a + self.b * ln3_enclosure(w / abs(self.b)), width)

    def sign(self) -> int:
        return _exact_sign(self)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.log(3.0)


# --------------------------------------------------------------------------
# Q(ln3)


def _poly_interval(p: list[Fraction], x: CertifiedInterval) -> CertifiedInterval:
    acc = CertifiedInterval.point(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


class Log3Rational:
    """Element of the field Q(ln3): ``num(ln3) / den(ln3)``.

    Stored reduced with a monic denominator, so equal values have equal
    representations (ln3 is transcendental).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Any, den: Any = (1,)) -> None:
        n = dp.to_fractions(num)
        d = dp.to_fractions(den)
        if not d:
            raise ZeroDivisionError("zero denominator")
        if not n:
            n, d = [], [Fraction(1)]
        else:
            g = dp.gcd(n, d)
            if len(g) > 1:
                n, _ = dp.divmod_(n, g)
                d, _ = dp.divmod_(d, g)
            lead = d[-1]
            n = [c / lead for c in n]
            d = [c / lead for c in d]
        object.__setattr__(self, "num", tuple(n))
        object.__setattr__(self, "den", tuple(d))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Log3Rational is immutable")

    @classmethod
    def coerce(cls, x: Any) -> Log3Rational:
        if isinstance(x, Log3Rational):
            return x
        if isinstance(x, Log3Linear):
            return cls([x.a, x.b])
        if _is_rational_like(x):
            return cls([x])
        raise TypeError(f"cannot convert {type(x).__name__} to Log3Rational")

    @classmethod
    def ratio(cls, num: Any, den: Any) -> Log3Rational:
        return cls.coerce(num) / cls.coerce(den)

    def as_log3linear(self) -> Log3Linear | None:
        if self.den == (1,) and len(self.num) <= 2:
            n = list(self.num) + [Fraction(0)] * (2 - len(self.num))
            return Log3Linear(n[0], n[1])
        return None

    def simplify(self) -> Log3Linear | Log3Rational:
        lin = self.as_log3linear()
        return lin if lin is not None else self

    def __repr__(self) -> str:
        return f"Log3Rational({list(map(str, self.num))}, {list(map(str, self.den))})"

    def __str__(self) -> str:
        return format_scalar(self)

    def __eq__(self, other: Any) -> bool:
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        lin = self.as_log3linear()
        if lin is not None:
            return hash(lin)
        return hash((self.num, self.den))

    def __bool__(self) -> bool:
        return bool(self.num)

    def __neg__(self) -> Log3Rational:
        return Log3Rational([-c for c in self.num], self.den)

    def __add__(self, other: Any) -> Log3Rational:
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        num = dp.add(dp.mul(self.num, o.den), dp.mul(o.num, self.den))
        return Log3Rational(num, dp.mul(self.den, o.den))

    __radd__ = __add__

    def __sub__(self, other: Any) -> Log3Rational:
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> Log3Rational:
        return self.coerce(other) - self

    def __mul__(self, other: Any) -> Log3Rational:
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return Log3Rational(dp.mul(self.num, o.num), dp.mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> Log3Rational:
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError("division by zero")
        return Log3Rational(dp.mul(self.num, o.den), dp.mul(self.den, o.num))

    def __rtruediv__(self, other: Any) -> Log3Rational:
        return self.coerce(other) / self

    def __pow__(self, n: int) -> Log3Rational:
        if n < 0:
            return Log3Rational([1]) / (self ** (-n))
        out = Log3Rational([1])
        for _ in range(n):
            out = out * self
        return out

    def enclose(self, width: Any = DEFAULT_WIDTH) -> CertifiedInterval:
        if len(self.num) <= 1 and len(self.den) == 1:
            return CertifiedInterval.point(self.num[0] if self.num else 0)

        def build(w: Fraction) -> CertifiedInterval:
            ln3 = ln3_enclosure(w)
            return _poly_interval(list(self.num), ln3) / _poly_interval(list(self.den), ln3)

        return _refine(build, width)

    def sign(self) -> int:
        return _exact_sign(self)

    def __float__(self) -> float:
        return float(self.enclose(Fraction(1, 10**20)).mid)


def _exact_sign(x: Any) -> int:
    if not x:
        return 0
    width = Fraction(1, 10**6)
    while True:
        s = enclose(x, width).sign()
        if s:
            return s
        width /= 10**8


def promote_mul(x: Any, y: Any) -> Any:
    """Product that climbs from Q + Q*ln3 into Q(ln3) when needed."""
    try:
        return x * y
    except DomainError:
        return (Log3Rational.coerce(x) * Log3Rational.coerce(y)).simplify()


def promote_div(x: Any, y: Any) -> Any:
    try:
        return x / y
    except DomainError:
        return (Log3Rational.coerce(x) / Log3Rational.coerce(y)).simplify()


def exact_sign(x: Any) -> int:
    """Sign of an exact scalar (Fraction, Log3Linear or Log3Rational)."""
    if _is_rational_like(x):
        return (x > 0) - (x < 0)
    return _exact_sign(x)


# --------------------------------------------------------------------------
# (2 pi)-graded values


ExactScalar = Union[Fraction, Log3Linear, Log3Rational]


def _normalize_coeff(c: Any) -> Log3Linear | Log3Rational:
    if _is_rational_like(c):
        return Log3Linear(c)
    if isinstance(c, Log3Linear):
        return c
    if isinstance(c, Log3Rational):
        return c.simplify()
    raise TypeError(f"PiGraded coefficient must be exact, got {type(c).__name__}")


class PiGraded:
    """``coeff * (2*pi)**two_pi_pow`` with an exact coefficient."""

    __slots__ = ("coeff", "two_pi_pow")

    def __init__(self, coeff: Any, two_pi_pow: int = 0) -> None:
        object.__setattr__(self, "coeff", _normalize_coeff(coeff))
        object.__setattr__(self, "two_pi_pow", int(two_pi_pow))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("PiGraded is immutable")

    def __repr__(self) -> str:
        return f"PiGraded({self.coeff!r}, {self.two_pi_pow})"

    def __str__(self) -> str:
        return format_pi_graded(self)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, PiGraded):
            if _is_rational_like(other) or isinstance(other, (Log3Linear, Log3Rational)):
                other = PiGraded(other, 0)
            else:
                return NotImplemented
        if not self.coeff and not other.coeff:
            return True
        return self.two_pi_pow == other.two_pi_pow and self.coeff == other.coeff

    def __hash__(self) -> int:
        if not self.coeff:
            return hash(0)
        return hash((self.coeff, self.two_pi_pow))

    def __bool__(self) -> bool:
        return bool(self.coeff)

    @staticmethod
    def _coerce(x: Any) -> PiGraded | None:
        if isinstance(x, PiGraded):
            return x
        if _is_rational_like(x) or isinstance(x, (Log3Linear, Log3Rational)):
            return PiGraded(x, 0)
        return None

    def __neg__(self) -> PiGraded:
        return PiGraded(-self.coeff, self.two_pi_pow)

    def __add__(self, other: Any) -> PiGraded:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.coeff:
            return self
        if not self.coeff:
            return o
        if o.two_pi_pow != self.two_pi_pow:
            raise DomainError(
                f"cannot add (2pi)^{self.two_pi_pow} and (2pi)^{o.two_pi_pow} terms"
            )
        return PiGraded(self.coeff + o.coeff, self.two_pi_pow)

    __radd__ = __add__

    def __sub__(self, other: Any) -> PiGraded:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> PiGraded:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> PiGraded:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PiGraded(promote_mul(self.coeff, o.coeff), self.two_pi_pow + o.two_pi_pow)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> PiGraded:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PiGraded(promote_div(self.coeff, o.coeff), self.two_pi_pow - o.two_pi_pow)

    def __rtruediv__(self, other: Any) -> PiGraded:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def enclose(self, width: Any = DEFAULT_WIDTH) -> CertifiedInterval:
        if self.two_pi_pow == 0 or not self.coeff:
            return enclose(self.coeff, width)

        def build(w: Fraction) -> CertifiedInterval:
            two_pi = 2 * pi_enclosure(w)
            return enclose(self.coeff, w) * two_pi**self.two_pi_pow

        return _refine(build, width)

    def sign(self) -> int:
        return exact_sign(self.coeff)

    def __float__(self) -> float:
        return float(self.coeff) * (2 * math.pi) ** self.two_pi_pow


def enclose(x: Any, width: Any = DEFAULT_WIDTH) -> CertifiedInterval:
    """Certified enclosure of any scalar in the family, of width <= ``width``."""
    if _is_rational_like(x):
        return CertifiedInterval.point(x)
    if hasattr(x, "enclose"):
        return x.enclose(as_rational(width))
    raise TypeError(f"cannot enclose {type(x).__name__}")


# --------------------------------------------------------------------------
# formatting and JSON


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _poly_str(p: tuple[Fraction, ...], var: str = "ln3") -> str:
    parts = []
    for i, c in enumerate(p):
        if c == 0:
            continue
        if i == 0:
            parts.append(_frac(c))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            parts.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{_frac(c)}*{mono}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


def format_scalar(x: Any) -> str:
    if _is_rational_like(x):
        return _frac(Fraction(x))
    if isinstance(x, Log3Linear):
        return _poly_str((x.a, x.b))
    if isinstance(x, Log3Rational):
        lin = x.as_log3linear()
        if lin is not None:
            return format_scalar(lin)
        num = _poly_str(x.num)
        if x.den == (1,):
            return num
        return f"({num})/({_poly_str(x.den)})"
    if isinstance(x, CertifiedInterval):
        return str(x)
    if isinstance(x, PiGraded):
        return format_pi_graded(x)
    return str(x)


def format_pi_graded(x: PiGraded) -> str:
    c = format_scalar(x.coeff)
    p = x.two_pi_pow
    if not x.coeff:
        return "0"
    if p == 0:
        return c
    if x.coeff == 1 and p != 1:
        return f"(2pi)^{p}"
    simple = isinstance(x.coeff, Log3Linear) and x.coeff.is_rational
    if simple and x.coeff.a.denominator == 1:
        head = c
    else:
        head = f"({c})"
    if p == 1:
        if simple:
            twice = 2 * x.coeff.a
            return f"{_frac(twice)}*pi" if twice.denominator == 1 else f"({_frac(twice)})*pi"
        return f"{head}*(2pi)"
    return f"{head}*(2pi)^{p}"


def to_json(x: Any) -> Any:
    if _is_rational_like(x):
        return {"rat": _frac(Fraction(x))}
    if isinstance(x, Log3Linear):
        return {"a": _frac(x.a), "b": _frac(x.b)}
    if isinstance(x, Log3Rational):
        lin = x.as_log3linear()
        if lin is not None:
            return to_json(lin)
        return {"num": [_frac(c) for c in x.num], "den": [_frac(c) for c in x.den]}
    if isinstance(x, PiGraded):
        return {"coeff": to_json(x.coeff), "two_pi_pow": x.two_pi_pow}
    if isinstance(x, CertifiedInterval):
        return {"lo": _frac(x.lo), "hi": _frac(x.hi)}
    raise TypeError(f"no JSON form for {type(x).__name__}")


def from_json(d: dict) -> Any:
    if "rat" in d:
        return Fraction(d["rat"])
    if "two_pi_pow" in d:
        return PiGraded(from_json(d["coeff"]), int(d["two_pi_pow"]))
    if "lo" in d:
        return CertifiedInterval(Fraction(d["lo"]), Fraction(d["hi"]))
    if "num" in d:
        return Log3Rational([Fraction(c) for c in d["num"]], [Fraction(c) for c in d["den"]])
    if "a" in d:
        return Log3Linear(Fraction(d["a"]), Fraction(d["b"]))
    raise ValueError(f"unrecognised scalar JSON: {d!r}")


def _fixed(n: int, places: int) -> str:
    """Integer ``n`` scaled by ``10**-places`` as fixed-point text."""
    sign = "-" if n < 0 else ""
    digits = str(abs(n)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}" if places else f"{sign}{digits}"


def decimal_bounds(x: Any, places: int = 30) -> tuple[str, str]:
    """Outward-rounded decimal bounds with ``places`` digits after the point."""
    iv = enclose(x, Fraction(1, 10 ** (places + 2)))
    scale = 10**places
    lo = math.floor(iv.lo * scale)
    hi = math.ceil(iv.hi * scale)
    return _fixed(lo, places), _fixed(hi, places)


def decimal_string(x: Any, places: int = 30) -> str:
    """Decimal text; a value not exactly representable is shown as a certified bracket."""
    iv = enclose(x, Fraction(1, 10 ** (places + 2)))
    if iv.width == 0 and (iv.lo * 10**places).denominator == 1:
        return _fixed(int(iv.lo * 10**places), places).rstrip("0").rstrip(".")
    lo, hi = decimal_bounds(x, places)
    return f"[{lo}, {hi}]"
