"""Laurent polynomials in ``u = 1 + tau`` on the momentum interval.

The momentum coordinate runs over ``tau in [0, 2]``, i.e. ``u in [1, 3]``.  All
reduced polynomials of the ansatz are sums of powers ``u**e`` with ``e >= -1``.
Besides exact evaluation and integration this module certifies the sign of a
polynomial on ``[1, 3]``: Sturm sequences for exact coefficients, interval
bisection for interval coefficients.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping

from . import _densepoly as dp
from .exact import (
    CertifiedInterval,
    Log3Linear,
    Log3Rational,
    enclose,
    exact_sign,
    from_json,
    promote_mul,
    to_json,
)

U_LO = Fraction(1)
U_HI = Fraction(3)
MIN_EXP = -1

PRECISION_LADDER = (Fraction(1, 10**10), Fraction(1, 10**30), Fraction(1, 10**60))


class UnsupportedExponent(ValueError):
    pass


class Undecidable(ArithmeticError):
    """Interval subdivision reached its depth limit without a verdict."""

    def __init__(self, depth: int) -> None:
        super().__init__(f"sign undecidable at subdivision depth {depth}; raise precision")
        self.depth = depth


def _coerce_coeff(c: Any) -> Any:
    if isinstance(c, bool):
        raise TypeError("bool coefficient")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, Log3Rational):
        return c.simplify()
    return c


def _is_zero(c: Any) -> bool:
    if isinstance(c, CertifiedInterval):
        return c.lo == 0 and c.hi == 0
    return c == 0


class LaurentPoly:
    """Immutable ``sum c_e * u**e`` with integer exponents ``e >= -1``."""

    __slots__ = ("terms",)

    def __init__(self, coeffs: Mapping[int, Any] | Iterable[tuple[int, Any]] = ()) -> None:
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Any] = {}
        for e, c in items:
            e = int(e)
            if e < MIN_EXP:
                raise UnsupportedExponent(f"exponent {e} below the Laurent floor {MIN_EXP}")
            c = _coerce_coeff(c)
            acc[e] = acc[e] + c if e in acc else c
        terms = tuple(sorted((e, c) for e, c in acc.items() if not _is_zero(c)))
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def monomial(cls, e: int, c: Any = 1) -> LaurentPoly:
        return cls({e: c})

    @classmethod
    def constant(cls, c: Any) -> LaurentPoly:
        return cls({0: c})

    # -- structure ----------------------------------------------------------
    def coeff(self, e: int) -> Any:
        for ee, c in self.terms:
            if ee == e:
                return c
        return Fraction(0)

    def as_dict(self) -> dict[int, Any]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def min_exp(self) -> int:
        return self.terms[0][0] if self.terms else 0

    @property
    def max_exp(self) -> int:
        return self.terms[-1][0] if self.terms else 0

    @property
    def has_interval_coeffs(self) -> bool:
        return any(isinstance(c, CertifiedInterval) for _, c in self.terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({dict(self.terms)!r})"

    def __str__(self) -> str:
        from .exact import format_scalar

        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.terms):
            mono = "" if e == 0 else "u" if e == 1 else f"u^{e}"
            cs = format_scalar(c)
            if mono:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"({cs})")
        return " + ".join(parts)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if len(self.terms) != len(other.terms):
            return False
        return all(e1 == e2 and c1 == c2 for (e1, c1), (e2, c2) in zip(self.terms, other.terms))

    def __hash__(self) -> int:
        return hash(tuple(e for e, _ in self.terms))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return LaurentPoly(list(self.terms) + list(other.terms))

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly([(e, -c) for e, c in self.terms])

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c: Any) -> LaurentPoly:
        return LaurentPoly([(e, promote_mul(x, c)) for e, x in self.terms])

    def __mul__(self, other: Any) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            out = []
            for e1, c1 in self.terms:
                for e2, c2 in other.terms:
                    out.append((e1 + e2, promote_mul(c1, c2)))
            return LaurentPoly(out)
        return self.scale(other)

    __rmul__ = __mul__

    def shift(self, j: int) -> LaurentPoly:
        """Multiply by ``u**j``."""
        return LaurentPoly([(e + j, c) for e, c in self.terms])

    def map_coeffs(self, f: Callable[[Any], Any]) -> LaurentPoly:
        return LaurentPoly([(e, f(c)) for e, c in self.terms])

    def enclose(self, width: Fraction) -> LaurentPoly:
        """Same polynomial with every coefficient replaced by an enclosure."""
        return self.map_coeffs(lambda c: enclose(c, width))

    # -- evaluation ---------------------------------------------------------
    def __call__(self, u: Any) -> Any:
        acc: Any = Fraction(0)
        for e, c in self.terms:
            acc = acc + promote_mul(c, u**e if e >= 0 else 1 / u)
        return acc

    def at_tau(self, tau: Any) -> Any:
        return self(1 + tau)

    def derivative_value(self, u: Any) -> Any:
        """d/du (= d/dtau) evaluated at ``u``; exponent -2 never materialises."""
        acc: Any = Fraction(0)
        for e, c in self.terms:
            if e == 0:
                continue
            acc = acc + promote_mul(c, e * u ** (e - 1) if e >= 1 else Fraction(-1) / (u * u))
        return acc

    def eval_box(self, lo: Fraction, hi: Fraction) -> CertifiedInterval:
        """Range enclosure over ``u in [lo, hi]`` (``lo > 0``); powers are monotone."""
        acc = CertifiedInterval.point(0)
        for e, c in self.terms:
            if e >= 0:
                p = CertifiedInterval(lo**e, hi**e)
            else:
                p = CertifiedInterval(1 / hi, 1 / lo)
            acc = acc + enclose(c, PRECISION_LADDER[0]) * p
        return acc

    # -- calculus -----------------------------------------------------------
    def weighted(self) -> LaurentPoly:
        """``(1 - tau) * p = (2 - u) * p``."""
        return self.scale(2) - self.shift(1)

    def antiderivative_from_one(self) -> tuple[LaurentPoly, Any]:
        """``(P, c)`` with ``int_1^u p(v) dv = P(u) + c*ln(u)`` and ``P(1) = 0``."""
        out: dict[int, Any] = {}
        log_coeff: Any = Fraction(0)
        for e, c in self.terms:
            if e == -1:
                log_coeff = c
            else:
                out[e + 1] = promote_mul(c, Fraction(1, e + 1))
        poly = LaurentPoly(out)
        return poly - LaurentPoly.constant(poly(Fraction(1))), log_coeff

    def integral_over_domain(self) -> Any:
        """Exact ``int_0^2 p(1+tau) dtau = int_1^3 p(u) du``."""
        total: Any = Fraction(0)
        for e, c in self.terms:
            if e == -1:
                total = total + promote_mul(c, Log3Linear.ln3())
            else:
                total = total + promote_mul(c, Fraction(3 ** (e + 1) - 1, e + 1))
        return total

    # -- conversions --------------------------------------------------------
    def cleared(self) -> list:
        """Dense coefficients of ``u**(-min_exp) * p``; same sign as p on u > 0."""
        if not self.terms:
            return []
        lo = self.min_exp
        dense: list = [Fraction(0)] * (self.max_exp - lo + 1)
        for e, c in self.terms:
            dense[e - lo] = c
        return dense

    def tau_coefficients(self) -> list:
        """Dense coefficients in ``tau`` (requires no negative exponents)."""
        if self.min_exp < 0:
            raise UnsupportedExponent("u**-1 has no polynomial tau expansion")
        out: list = [Fraction(0)] * (self.max_exp + 1)
        from math import comb

        for e, c in self.terms:
            for j in range(e + 1):
                out[j] = out[j] + promote_mul(c, comb(e, j))
        return dp.trim(out) or [Fraction(0)]

    def sigma_coefficients(self) -> list:
        """Dense coefficients in ``sigma = 2 - tau = 3 - u`` (no negative exponents)."""
        if self.min_exp < 0:
            raise UnsupportedExponent("u**-1 has no polynomial sigma expansion")
        out: list = [Fraction(0)] * (self.max_exp + 1)
        from math import comb

        for e, c in self.terms:
            for j in range(e + 1):
                out[j] = out[j] + promote_mul(c, comb(e, j) * 3 ** (e - j) * (-1) ** j)
        return out

    def float_coeffs(self) -> tuple[list[float], int]:
        """(dense float coefficients, exponent of the first entry)."""
        dense = self.cleared()
        return [float(c) for c in dense], self.min_exp

    def to_json(self) -> dict:
        return {
            "var": "u=1+tau",
            "terms": [{"exp": e, "coeff": to_json(c)} for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, d: dict) -> LaurentPoly:
        return cls([(t["exp"], from_json(t["coeff"])) for t in d["terms"]])


# --------------------------------------------------------------------------
# moment integrals


def moment_integral(m: int) -> Log3Linear:
    """``int_0^2 (1 - t) (1 + t)**m dt`` exactly."""
    if m < MIN_EXP:
        raise UnsupportedExponent(f"moment of order {m} is not supported")
    value = LaurentPoly.monomial(m).weighted().integral_over_domain()
    return value if isinstance(value, Log3Linear) else Log3Linear(value)


def a_closed_form(k: int) -> Fraction:
    if k < 1:
        raise ValueError("k must be >= 1")
    den = (k + 1) * (k + 2)
    return Fraction(3 ** (k + 1) * (1 - k), den) - Fraction(k + 3, den)


def compute_R(k: int) -> Log3Linear:
    """Moment ratio ``R_k = A_{k-2} / A_k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return moment_integral(k - 2) / moment_integral(k)


@dataclass(frozen=True)
class RkBounds:
    k: int
    a_k: Fraction
    a_k_minus_2: Fraction
    r_k: Fraction
    upper_ok: bool
    lower_ok: bool
    printed_upper_expansion: Fraction
    printed_lower_expansion: Fraction

    @property
    def printed_upper_matches(self) -> bool:
        return self.printed_upper_expansion == self.a_k - self.a_k_minus_2

    @property
    def printed_lower_matches(self) -> bool:
        return self.printed_lower_expansion == self.a_k - 9 * self.a_k_minus_2


def rk_bounds(k: int) -> RkBounds:
    """Exact check of ``1 > R_k > 1/9`` through the two moment differences.

    With both moments negative, ``A_k - A_{k-2} < 0`` gives ``R_k < 1`` and
    ``A_k - 9 A_{k-2} > 0`` gives ``R_k > 1/9``.  The expanded forms used in the
    classical proof are evaluated alongside and compared.
    """
    if k < 5:
        raise ValueError("bounds are stated for k >= 5")
    ak = a_closed_form(k)
    akm2 = a_closed_form(k - 2)
    both_negative = ak < 0 and akm2 < 0
    den = (k - 1) * k * (k + 1) * (k + 2)
    upper_exp = (
        3 ** (k - 1) * 8 * k * Fraction(-k * k + 4 * k + 3, den)
        - 2 * 3 ** (k - 1) * (Fraction(10, (k - 1) * (k + 1)) + Fraction(3, k * (k + 2)))
        + 2 * Fraction(k * k + 4 * k + 1, den)
    )
    lower_exp = (
        2 * 3 ** (k + 1) * Fraction(k * k - 4 * k - 3, den)
        + 8 * k * Fraction(k * k + 4 * k + 1, den)
        + Fraction(2 * k * k + 40 * k + 18, den)
    )
    return RkBounds(
        k=k,
        a_k=ak,
        a_k_minus_2=akm2,
        r_k=akm2 / ak,
        upper_ok=both_negative and ak - akm2 < 0,
        lower_ok=both_negative and ak - 9 * akm2 > 0,
        printed_upper_expansion=upper_exp,
        printed_lower_expansion=lower_exp,
    )


# --------------------------------------------------------------------------
# sign certification


class Verdict(str, enum.Enum):
    POSITIVE = "PositiveOn[1,3]"
    NEGATIVE = "NegativeOn[1,3]"
    SIGN_CHANGE = "SignChange"
    TOUCHES_ZERO = "TouchesZero"


@dataclass(frozen=True)
class SignCertificate:
    verdict: Verdict
    method: str
    witness: tuple[Fraction, Fraction] | None = None
    roots_in_domain: int | None = None

    @property
    def is_definite(self) -> bool:
        return self.verdict in (Verdict.POSITIVE, Verdict.NEGATIVE)

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict.value, "method": self.method}
        if self.witness is not None:
            lo, hi = self.witness
            out["witness_u"] = {"lo": str(lo), "hi": str(hi)}
            out["witness_tau"] = {"lo": str(lo - 1), "hi": str(hi - 1)}
        if self.roots_in_domain is not None:
            out["roots_in_domain"] = self.roots_in_domain
        return out


def _dense_sign(p: list, x: Fraction) -> int:
    return exact_sign(dp.horner(p, x))


def sturm_chain(p: list) -> list[list]:
    chain = [dp.trim(p), dp.derivative(p)]
    while chain[-1]:
        _, r = dp.divmod_(chain[-2], chain[-1])
        chain.append([-c for c in r])
    return chain[:-1]


def _variations(chain: list[list], x: Fraction) -> int:
    signs = [s for s in (_dense_sign(q, x) for q in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: list, lo: Fraction, hi: Fraction, chain: list[list] | None = None) -> int:
    """Distinct real roots of dense ``p`` in ``(lo, hi]``."""
    chain = chain if chain is not None else sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


_WITNESS_WIDTH = Fraction(1, 2**40)


def _sturm_certificate(p: list) -> SignCertificate:
    chain = sturm_chain(p)
    lo, hi = U_LO, U_HI
    s_lo, s_hi = _dense_sign(p, lo), _dense_sign(p, hi)
    if s_lo == 0 or s_hi == 0:
        r = lo if s_lo == 0 else hi
        return SignCertificate(Verdict.TOUCHES_ZERO, "sturm", (r, r), None)
    n = count_roots(p, lo, hi, chain)
    if n == 0:
        return SignCertificate(Verdict.POSITIVE if s_lo > 0 else Verdict.NEGATIVE, "sturm", None, 0)

    # isolate roots left to right; the first one of odd multiplicity is the witness
    stack = [(lo, hi)]
    isolated: list[tuple[Fraction, Fraction]] = []
    while stack:
        a, b = stack.pop()
        c = count_roots(p, a, b, chain)
        if c == 0:
            continue
        if c == 1:
            isolated.append((a, b))
            continue
        m = (a + b) / 2
        step = (b - a) / 7
        while _dense_sign(p, m) == 0:
            m += step
            step /= 2
        stack.append((m, b))
        stack.append((a, m))
    isolated.sort()
    for a, b in isolated:
        sa, sb = _dense_sign(p, a), _dense_sign(p, b)
        if sa * sb < 0:
            while b - a > _WITNESS_WIDTH:
                m = (a + b) / 2
                sm = _dense_sign(p, m)
                if sm == 0:
                    a, b = m - _WITNESS_WIDTH / 4, m + _WITNESS_WIDTH / 4
                    break
                if sm == sa:
                    a = m
                else:
                    b = m
            return SignCertificate(Verdict.SIGN_CHANGE, "sturm", (a, b), n)
    # only even-multiplicity roots: shrink around the first by counting halves
    a, b = isolated[0]
    while b - a > _WITNESS_WIDTH:
        m = (a + b) / 2
        if _dense_sign(p, m) == 0:
            a = b = m
            break
        if count_roots(p, a, m, chain):
            b = m
        else:
            a = m
    return SignCertificate(Verdict.TOUCHES_ZERO, "sturm", (a, b), n)


def _interval_certificate(p: LaurentPoly, depth_limit: int) -> SignCertificate:
    def point_sign(x: Fraction) -> int | None:
        return p.eval_box(x, x).sign()

    pos: Fraction | None = None
    neg: Fraction | None = None
    cells = [(U_LO, U_HI, 0)]
    verdict_sign: int | None = None
    undecided_depth = None
    for x in (U_LO, U_HI):
        s = point_sign(x)
        if s == 1:
            pos = x
        elif s == -1:
            neg = x
    while cells and (pos is None or neg is None):
        next_cells = []
        for a, b, depth in cells:
            s = p.eval_box(a, b).sign()
            if s in (1, -1):
                verdict_sign = s if verdict_sign in (None, s) else 0
                if s == 1 and pos is None:
                    pos = a
                elif s == -1 and neg is None:
                    neg = a
                continue
            m = (a + b) / 2
            sm = point_sign(m)
            if sm == 1 and pos is None:
                pos = m
            elif sm == -1 and neg is None:
                neg = m
            if depth >= depth_limit:
                undecided_depth = depth
                continue
            next_cells += [(a, m, depth + 1), (m, b, depth + 1)]
        cells = next_cells
    if pos is not None and neg is not None:
        a, b = sorted((pos, neg))
        sa = 1 if a == pos else -1
        while b - a > _WITNESS_WIDTH:
            m = (a + b) / 2
            sm = point_sign(m)
            if sm is None or sm == 0:
                break
            if sm == sa:
                a = m
            else:
                b = m
        return SignCertificate(Verdict.SIGN_CHANGE, "interval", (a, b), None)
    if undecided_depth is not None:
        raise Undecidable(undecided_depth)
    if verdict_sign == 1:
        return SignCertificate(Verdict.POSITIVE, "interval", None, 0)
    if verdict_sign == -1:
        return SignCertificate(Verdict.NEGATIVE, "interval", None, 0)
    raise Undecidable(depth_limit)  # pragma: no cover


def sign_on_domain(p: LaurentPoly, method: str | None = None, depth_limit: int = 48) -> SignCertificate:
    """Certify the sign of ``p`` on ``u in [1, 3]``.

    Exact coefficients go through a Sturm sequence; interval coefficients go
    through adaptive bisection.  ``method="interval"`` forces bisection on an
    exact polynomial, escalating its coefficient enclosures along
    :data:`PRECISION_LADDER` before giving up with :class:`Undecidable`.
    """
    if p.is_zero:
        raise ValueError("sign of the zero polynomial is undefined")
    if p.has_interval_coeffs:
        return _interval_certificate(p, depth_limit)
    if method is None or method == "sturm":
        dense = p.cleared()
        if not all(isinstance(c, Fraction) for c in dense):
            dense = [Log3Rational.coerce(c) for c in dense]
        return _sturm_certificate(dense)
    if method != "interval":
        raise ValueError(f"unknown method {method!r}")
    last: Undecidable | None = None
    for width in PRECISION_LADDER:
        try:
            return _interval_certificate(p.enclose(width), depth_limit)
        except Undecidable as exc:
            last = exc
    assert last is not None
    raise last
