"""Ansatz scenarios on X_k = P(L + O) over (P^1)^k and their topological constants.

Three choices of the traceless twist are supported:

* ``general`` -- the twist mixes fibre and base, with integers ``(m1, m2)``
  fixing ``a_k`` and ``b_k``;
* ``even``    -- alternating base twist, ``k`` even;
* ``odd``     -- weighted base twist ``(k-1, -1, ..., -1)``, ``k`` odd.

All constants are exact.  ``a_k`` and ``b_k`` are elements of Q(ln3), so the
general case is exact too; decimal enclosures are derived on demand.  The
momentum interval is fixed to ``[0, 2]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .exact import (
    CertifiedInterval,
    DEFAULT_WIDTH,
    Log3Linear,
    Log3Rational,
    PiGraded,
    as_rational,
    enclose,
)
from .poly import LaurentPoly, compute_R


class InvalidScenario(ValueError):
    pass


class NotSolvable(Exception):
    pass


class Case(str, enum.Enum):
    GENERAL = "general"
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class Scenario:
    case: Case
    k: int
    m1: int = 0
    m2: int = 0
    alpha1: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        try:
            case = Case(self.case)
        except ValueError:
            raise InvalidScenario(f"unknown case {self.case!r}") from None
        object.__setattr__(self, "case", case)
        object.__setattr__(self, "alpha1", as_rational(self.alpha1))
        k = self.k
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise InvalidScenario(f"k must be a positive integer, got {k!r}")
        if case is Case.EVEN and (k % 2 or k < 2):
            raise InvalidScenario(f"even case needs even k >= 2, got k={k}")
        if case is Case.ODD and (k % 2 == 0 or k < 3):
            raise InvalidScenario(f"odd case needs odd k >= 3, got k={k}")
        if case is Case.GENERAL:
            if (self.m1, self.m2) == (0, 0):
                raise InvalidScenario("general case needs (m1, m2) != (0, 0)")
        else:
            object.__setattr__(self, "m1", 0)
            object.__setattr__(self, "m2", 0)
        if self.alpha1 <= 0:
            raise InvalidScenario("alpha1 must be positive")

    @property
    def sort_key(self) -> tuple:
        return (self.case.value, self.k, self.m1, self.m2, self.alpha1)

    @property
    def label(self) -> str:
        if self.case is Case.GENERAL:
            return f"general k={self.k} (m1,m2)=({self.m1},{self.m2})"
        return f"{self.case.value} k={self.k}"

    def to_json(self) -> dict:
        return {
            "case": self.case.value,
            "k": self.k,
            "m1": self.m1,
            "m2": self.m2,
            "alpha1": str(self.alpha1),
        }

    @classmethod
    def from_json(cls, d: dict) -> Scenario:
        return cls(
            Case(d["case"]),
            int(d["k"]),
            int(d.get("m1", 0)),
            int(d.get("m2", 0)),
            Fraction(str(d.get("alpha1", "1"))),
        )


# --------------------------------------------------------------------------


def volume_constant(k: int) -> PiGraded:
    """Total volume ``int omega^(k+1) = k! (3^(k+1) - 1) (2 pi)^(k+1)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return PiGraded(math.factorial(k) * (3 ** (k + 1) - 1), k + 1)


@dataclass(frozen=True)
class AkBk:
    """``a_k = (m1 + k m2 ln3)/(2 + 3k ln3)``, ``b_k = (2 m2 - 3 m1)/(2 + 3k ln3)``."""

    k: int
    m1: int
    m2: int

    @property
    def denominator(self) -> Log3Linear:
        return Log3Linear(2, 3 * self.k)

    @property
    def a_numerator(self) -> Log3Linear:
        return Log3Linear(self.m1, self.k * self.m2)

    @property
    def b_numerator(self) -> Log3Linear:
        return Log3Linear(2 * self.m2 - 3 * self.m1, 0)

    @property
    def a(self) -> Log3Rational:
        return Log3Rational.ratio(self.a_numerator, self.denominator)

    @property
    def b(self) -> Log3Rational:
        return Log3Rational.ratio(self.b_numerator, self.denominator)

    def intervals(self, width: Fraction = DEFAULT_WIDTH) -> tuple[CertifiedInterval, CertifiedInterval]:
        return enclose(self.a, width), enclose(self.b, width)


def ak_bk(k: int, m1: int, m2: int) -> AkBk:
    if (m1, m2) == (0, 0):
        raise InvalidScenario("(m1, m2) must not both vanish")
    return AkBk(k, m1, m2)


def lambda_constant(s: Scenario) -> PiGraded:
    """Hermitian-Yang-Mills constant: ``(k+1)/(2 pi)``, times ``a_k`` in the general case."""
    if s.case is Case.GENERAL:
        return PiGraded((s.k + 1) * ak_bk(s.k, s.m1, s.m2).a, -1)
    return PiGraded(s.k + 1, -1)


def _weights(s: Scenario) -> tuple[Any, Any]:
    """(w, e): the ``u^k`` weight of ``omega^2`` and the ``u^(k-2)`` twist term.

    The reduced density of ``F^F^omega^(k-1)`` is ``(k+1)! w u^k - e u^(k-2)``.
    """
    k = s.k
    if s.case is Case.GENERAL:
        ab = ak_bk(k, s.m1, s.m2)
        return ab.a**2, math.factorial(k + 1) * ab.b**2
    if s.case is Case.EVEN:
        return Fraction(1), Fraction(math.factorial(k))
    return Fraction(1), Fraction(k * (k - 1) * math.factorial(k - 1))


def chern_density(s: Scenario) -> LaurentPoly:
    w, e = _weights(s)
    k = s.k
    return LaurentPoly({k: math.factorial(k + 1) * w}) - LaurentPoly({k - 2: e})


def c_tilde(s: Scenario) -> PiGraded:
    """Normalising constant of the coupled equation, computed by integration.

    ``C~ = alpha1 * 2/(k-1)! * (2 pi)^(k-1) int_0^2 density dtau / (C_k/(k+1)!)``.
    """
    k = s.k
    integral = chern_density(s).integral_over_domain()
    chern_total = PiGraded(Fraction(2, math.factorial(k - 1)) * integral, k - 1)
    volume = volume_constant(k) / math.factorial(k + 1)
    return chern_total * s.alpha1 / volume


def printed_c_tilde(s: Scenario) -> PiGraded | None:
    """Closed forms for ``C~`` as published, where one is published."""
    k, a1 = s.k, s.alpha1
    if s.case is Case.EVEN and k == 2:
        return PiGraded(12 * a1 * (1 - Fraction(1, 13)), -2)
    if s.case is Case.EVEN and k == 4:
        return PiGraded(40 * a1 * (1 - Fraction(13, 363)), -2)
    if s.case is Case.ODD and k == 3:
        return PiGraded(24 * a1 * (1 - Fraction(1, 10)), -2)
    if s.case is Case.GENERAL:
        ab = ak_bk(k, s.m1, s.m2)
        a2, b2 = ab.a**2, ab.b**2
        if k == 1:
            return PiGraded(a1 * (4 * a2 - b2 * Log3Linear.ln3()), -2)
        pref = Fraction(2 * (k + 1) ** 2 * k, 3 ** (k + 1) - 1) * a1
        inner = a2 * Fraction(3 ** (k + 1) - 1, k + 1) - b2 * Fraction(3 ** (k - 1) - 1, k - 1)
        return PiGraded(pref * inner, -2)
    return None


def q_unit(s: Scenario) -> PiGraded:
    """Scale in which reduced polynomials are expressed: ``alpha1 / (2 pi)^2``."""
    return PiGraded(s.alpha1, -2)


def q_parts(s: Scenario) -> tuple[LaurentPoly, LaurentPoly]:
    """Reduced polynomial split as ``base + rho * slope`` in units of :func:`q_unit`.

    ``rho`` is the coefficient of the coupling ratio
    ``alpha0/alpha1 = rho * (2 pi)^(k-1)``.
    """
    k = s.k
    unit = q_unit(s)
    w, _ = _weights(s)
    if s.case is Case.GENERAL:
        b2 = ak_bk(k, s.m1, s.m2).b ** 2
        twist = 2 * (k + 1) * k * b2
    elif s.case is Case.EVEN:
        twist = Fraction(2 * k)
    else:
        twist = Fraction(2 * k * (k - 1))
    # -2 alpha1 (k+1) k w/(2pi)^2 + C~, divided by the unit
    lead = (PiGraded(-2 * (k + 1) * k * s.alpha1 * w, -2) + c_tilde(s)) / unit
    base = LaurentPoly({k: lead.coeff, k - 2: twist})
    # alpha0 (k+1)!/(2 C_k) with alpha0 = (2pi)^(k-1) alpha1
    per_ratio = PiGraded(s.alpha1, k - 1) * math.factorial(k + 1) / (2 * volume_constant(k)) / unit
    if per_ratio.two_pi_pow != 0 or lead.two_pi_pow != 0:
        raise AssertionError("grading mismatch in reduced polynomial")  # pragma: no cover
    return base, LaurentPoly({k: per_ratio.coeff})


def constraint_ratio(s: Scenario) -> PiGraded:
    """``alpha0/alpha1`` that makes ``int_0^2 (1-t) Q(t) dt`` vanish.

    Computed for every scenario, including those where the resulting ``Q``
    fails to be sign-definite.
    """
    base, slope = q_parts(s)
    i_base = base.weighted().integral_over_domain()
    i_slope = slope.weighted().integral_over_domain()
    rho = -(Log3Rational.coerce(i_base) / Log3Rational.coerce(i_slope))
    return PiGraded(rho, s.k - 1)


def coupling_ratio(s: Scenario) -> PiGraded:
    """Required ``alpha0/alpha1``; raises :class:`NotSolvable` if no solution results."""
    from .profile import Status, solvability

    report = solvability(s, samples=0)
    if report.status is not Status.SOLVABLE:
        raise NotSolvable(f"{s.label}: {report.reason}")
    return report.ratio


def printed_coupling_ratio(s: Scenario) -> PiGraded | None:
    """Published closed forms of the coupling condition, rearranged to alpha0/alpha1."""
    k = s.k
    if s.case is Case.EVEN and k == 2:
        return PiGraded(Fraction(32, 2), 1)  # 32 pi
    if s.case is Case.ODD and k == 3:
        return PiGraded(32 * Fraction(38, 21), 2)
    if s.case is Case.EVEN and k == 4:
        # 3 alpha0 / (4! (2pi)^3) = (2*235)/(3*23) alpha1
        return PiGraded(Fraction(2 * 235, 3 * 23) * Fraction(24, 3), 3)
    if s.case is Case.GENERAL and 1 <= k <= 4:
        b2 = ak_bk(k, s.m1, s.m2).b ** 2
        if k == 1:
            return PiGraded(8 * b2 * Log3Linear(-12, 13), 0)
        r = compute_R(k).a
        bracket = Fraction((k + 1) * (3 ** (k - 1) - 1), (k - 1) * (3 ** (k + 1) - 1)) - r
        # (k+1)/(2 (2pi)^(k+1) (3^(k+1)-1)) alpha0 = alpha1 2 b^2 (k+1) k/(2pi)^2 bracket
        factor = Fraction(2 * (3 ** (k + 1) - 1), k + 1)
        return PiGraded(factor * 2 * (k + 1) * k * b2 * bracket, k - 1)
    return None


@dataclass(frozen=True)
class ConstantSet:
    scenario: Scenario
    C_k: PiGraded
    lam: PiGraded
    C_tilde: PiGraded
    R_k: Log3Linear
    ratio: PiGraded
    a_k: Log3Rational | None = None
    b_k: Log3Rational | None = None
    printed_C_tilde: PiGraded | None = None
    printed_ratio: PiGraded | None = None

    @property
    def flags(self) -> list[str]:
        out = []
        if self.printed_C_tilde is not None and self.printed_C_tilde != self.C_tilde:
            out.append("C_tilde differs from published closed form")
        if self.printed_ratio is not None and self.printed_ratio != self.ratio:
            out.append("coupling ratio differs from published closed form")
        return out


def constants(s: Scenario) -> ConstantSet:
    ab = ak_bk(s.k, s.m1, s.m2) if s.case is Case.GENERAL else None
    return ConstantSet(
        scenario=s,
        C_k=volume_constant(s.k),
        lam=lambda_constant(s),
        C_tilde=c_tilde(s),
        R_k=compute_R(s.k),
        ratio=constraint_ratio(s),
        a_k=ab.a if ab else None,
        b_k=ab.b if ab else None,
        printed_C_tilde=printed_c_tilde(s),
        printed_ratio=printed_coupling_ratio(s),
    )
