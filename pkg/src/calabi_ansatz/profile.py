"""Reduced polynomial, momentum profile, boundary conditions and solvability.

For a scenario with coupling ratio ``alpha0/alpha1`` the coupled system
reduces to ``alpha0 e^(s - f) / (2 C') = phi(tau) Q(tau)``.  Differentiating
the logarithm gives ``(phi Q)' = (1 - tau) Q``, hence

    phi(tau) = N(tau) / Q(tau),   N(tau) = int_0^tau (1 - t) Q(t) dt,

and ``phi(2) = 0`` forces the obstruction integral ``N(2)`` to vanish.
"""

from __future__ import annotations

import enum
from functools import cached_property
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact import (
    CertifiedInterval,
    Log3Linear,
    Log3Rational,
    PiGraded,
    enclose,
    exact_sign,
    log_enclosure,
    promote_mul,
    to_json,
)
from .poly import LaurentPoly, SignCertificate, Verdict, compute_R, sign_on_domain
from .scenario import Case, Scenario, constraint_ratio, printed_coupling_ratio, q_parts, q_unit


class PoleInDomain(ValueError):
    """Q changes sign on the momentum interval, so N/Q has a pole."""

    def __init__(self, certificate: SignCertificate) -> None:
        super().__init__(f"denominator is not sign-definite: {certificate.verdict.value}")
        self.certificate = certificate


@dataclass(frozen=True)
class ReducedPolynomial:
    """``Q = unit * poly`` with ``unit = alpha1 / (2 pi)^2``."""

    poly: LaurentPoly
    unit: PiGraded

    def scaled(self, c: Any) -> ReducedPolynomial:
        return ReducedPolynomial(self.poly.scale(c), self.unit)

    def to_json(self) -> dict:
        return {"unit": to_json(self.unit), "poly": self.poly.to_json()}


def build_Q(s: Scenario, ratio: PiGraded) -> ReducedPolynomial:
    """Reduced polynomial G_k / D_k / P_k for a given ``alpha0/alpha1``.

    ``ratio`` must carry the grade ``(2 pi)^(k-1)``, the only one in which the
    polynomial is homogeneous.
    """
    if not isinstance(ratio, PiGraded):
        ratio = PiGraded(ratio, s.k - 1)
    if ratio and ratio.two_pi_pow != s.k - 1:
        raise ValueError(f"ratio must be graded (2pi)^{s.k - 1}, got (2pi)^{ratio.two_pi_pow}")
    if ratio.sign() <= 0:
        raise ValueError("alpha0/alpha1 must be positive")
    base, slope = q_parts(s)
    return ReducedPolynomial(base + slope.scale(ratio.coeff), q_unit(s))


def factored_Q(s: Scenario) -> ReducedPolynomial:
    """Published factored form ``twist * u^(k-2) * (1 - R_k u^2)`` at the constraint."""
    base, _ = q_parts(s)
    twist = base.coeff(s.k - 2)
    r = compute_R(s.k)
    poly = LaurentPoly({s.k - 2: 1}) - LaurentPoly({s.k: r})
    return ReducedPolynomial(poly.scale(twist), q_unit(s))


def obstruction_integral(Q: LaurentPoly | ReducedPolynomial) -> Any:
    """``int_0^2 (1 - t) Q(t) dt``; zero exactly when ``phi(2) = 0``."""
    if isinstance(Q, ReducedPolynomial):
        return Q.unit * PiGraded(obstruction_integral(Q.poly), 0)
    return Q.weighted().integral_over_domain()


# --------------------------------------------------------------------------


def _as_exact(x: Any) -> Any:
    if isinstance(x, Log3Rational):
        return x.simplify()
    return x


@dataclass(frozen=True)
class MomentumProfile:
    """``phi = (P(u) + log_coeff * ln u) / Q(u)`` with ``u = 1 + tau``."""

    numerator: LaurentPoly
    log_coeff: Any
    denominator: LaurentPoly
    certificate: SignCertificate | None = None

    @property
    def has_log(self) -> bool:
        return self.log_coeff != 0

    def numerator_at_u(self, u: Fraction) -> Any:
        val = self.numerator(u)
        if self.has_log:
            if u == 1:
                return val
            if u == 3:
                return _as_exact(val + promote_mul(self.log_coeff, Log3Linear.ln3()))
            raise ValueError("ln(u) is not exact at this point; use phi_enclosure")
        return _as_exact(val)

    def phi(self, tau: Any) -> Any:
        """Exact value (all polynomial profiles; log profiles only at tau in {0, 2})."""
        u = 1 + Fraction(tau)
        return _as_exact(Log3Rational.coerce(self.numerator_at_u(u)) / Log3Rational.coerce(self.denominator(u)))

    def dphi(self, tau: Any) -> Any:
        """Exact ``phi' = ((1 - tau) Q^2 - N Q') / Q^2`` at ``tau``."""
        tau = Fraction(tau)
        u = 1 + tau
        q = Log3Rational.coerce(self.denominator(u))
        dq = Log3Rational.coerce(self.denominator.derivative_value(u))
        n = Log3Rational.coerce(self.numerator_at_u(u))
        return _as_exact(((1 - tau) * q * q - n * dq) / (q * q))

    def enclosed_parts(self, width: Fraction) -> tuple:
        """Interval-coefficient numerator, log coefficient and denominator."""
        lc = enclose(self.log_coeff, width) if self.has_log else None
        return self.numerator.enclose(width), lc, self.denominator.enclose(width)

    def phi_enclosure(self, tau: Any, width: Fraction = Fraction(1, 10**20), parts: tuple | None = None) -> CertifiedInterval:
        u = 1 + Fraction(tau)
        num, lc, den = parts or self.enclosed_parts(width)
        n = CertifiedInterval._coerce(num(u))
        if lc is not None:
            n = n + lc * log_enclosure(u, width)
        return n / CertifiedInterval._coerce(den(u))

    def tau_coefficients(self) -> list | None:
        """phi in the tau basis when Q is constant, else None."""
        if self.has_log or self.denominator.max_exp != 0 or self.denominator.min_exp != 0:
            return None
        q = self.denominator.coeff(0)
        return [_as_exact(Log3Rational.coerce(c) / Log3Rational.coerce(q)) for c in self.numerator.tau_coefficients()]

    def float_arrays(self) -> tuple[list[float], list[float], float, list[float], int]:
        return self._float_arrays

    @cached_property
    def _float_arrays(self) -> tuple[list[float], list[float], float, list[float], int]:
        """Kernel inputs: numerator about tau=0, about tau=2, log coefficient, Q, Q offset.

        Expanding N about both ends keeps its evaluation accurate where it
        vanishes; the ln(u/3) split moves ``log_coeff*ln3`` into the constant.
        """
        left = [float(c) for c in self.numerator.tau_coefficients()]
        right = list(self.numerator.sigma_coefficients())
        if self.has_log:
            right[0] = right[0] + promote_mul(self.log_coeff, Log3Linear.ln3())
        right = [float(Log3Rational.coerce(c).simplify()) if not isinstance(c, Fraction) else float(c) for c in right]
        den, off = self.denominator.float_coeffs()
        return left, right, float(self.log_coeff), den, off

    def to_json(self) -> dict:
        out = {
            "numerator": self.numerator.to_json(),
            "log_coeff": to_json(_as_exact(self.log_coeff) if not isinstance(self.log_coeff, int) else Fraction(self.log_coeff)),
            "denominator": self.denominator.to_json(),
        }
        coeffs = self.tau_coefficients()
        if coeffs is not None:
            out["phi_tau_coefficients"] = [to_json(c) for c in coeffs]
        return out


def build_profile(Q: LaurentPoly | ReducedPolynomial) -> MomentumProfile:
    """Momentum profile ``phi = N/Q``; Q must not change sign on the interval."""
    poly = Q.poly if isinstance(Q, ReducedPolynomial) else Q
    cert = sign_on_domain(poly)
    if not cert.is_definite:
        raise PoleInDomain(cert)
    num, log_coeff = poly.weighted().antiderivative_from_one()
    return MomentumProfile(num, _as_exact(log_coeff), poly, cert)


@dataclass(frozen=True)
class BoundaryCondition:
    name: str
    expected: Any
    value: Any

    @property
    def passed(self) -> bool:
        return self.value == self.expected

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "expected": to_json(self.expected),
            "value": to_json(self.value),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class BoundaryReport:
    conditions: tuple[BoundaryCondition, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> BoundaryCondition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> list:
        return [c.to_json() for c in self.conditions]


def boundary_check(p: MomentumProfile) -> BoundaryReport:
    """Exact ``phi(0)=0, phi'(0)=1, phi(2)=0, phi'(2)=-1``."""
    zero, two = Fraction(0), Fraction(2)
    return BoundaryReport((
        BoundaryCondition("phi(0)", Fraction(0), p.phi(zero)),
        BoundaryCondition("phi'(0)", Fraction(1), p.dphi(zero)),
        BoundaryCondition("phi(2)", Fraction(0), p.phi(two)),
        BoundaryCondition("phi'(2)", Fraction(-1), p.dphi(two)),
    ))


def interior_positive(p: MomentumProfile, samples: int = 1000) -> bool:
    """phi > 0 at ``samples`` equally spaced rational points of (0, 2)."""
    width = Fraction(1, 10**20)
    qs = exact_sign(p.denominator(Fraction(2)))
    parts = p.enclosed_parts(width)
    for i in range(1, samples + 1):
        tau = Fraction(2 * i, samples + 1)
        if not p.has_log and all(isinstance(c, Fraction) for _, c in p.numerator.terms):
            if exact_sign(p.numerator(1 + tau)) != qs:
                return False
            continue
        s = p.phi_enclosure(tau, width, parts).sign()
        if s is None:
            s = exact_sign(p.phi(tau)) if not p.has_log else p.phi_enclosure(tau, width / 10**20).sign()
        if s != 1:
            return False
    return True


# --------------------------------------------------------------------------


class Status(str, enum.Enum):
    SOLVABLE = "Solvable"
    NO_SOLUTION = "NoSolution"


@dataclass(frozen=True)
class SolvabilityReport:
    scenario: Scenario
    status: Status
    ratio: PiGraded
    Q: ReducedPolynomial
    certificate: SignCertificate | None
    reason: str
    boundary: BoundaryReport | None = None
    profile: MomentumProfile | None = None
    interior_checked: int = 0
    printed_ratio: PiGraded | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def solvable(self) -> bool:
        return self.status is Status.SOLVABLE

    def to_json(self) -> dict:
        out: dict = {
            "scenario": self.scenario.to_json(),
            "verdict": self.status.value,
            "reason": self.reason,
            "alpha0_over_alpha1": to_json(self.ratio),
            "alpha0_over_alpha1_text": str(self.ratio),
            "alpha0_over_alpha1_enclosure": to_json(enclose(self.ratio, Fraction(1, 10**20))),
            "Q": self.Q.to_json(),
        }
        if self.printed_ratio is not None:
            out["matches_published_ratio"] = self.printed_ratio == self.ratio
        if self.certificate is not None:
            out["positivity"] = self.certificate.to_json()
        if self.boundary is not None:
            out["boundary"] = self.boundary.to_json()
        if self.profile is not None:
            out["profile"] = self.profile.to_json()
        if self.interior_checked:
            out["interior_samples_positive"] = self.interior_checked
        return out


def solvability(s: Scenario, samples: int = 1000) -> SolvabilityReport:
    """Solve the obstruction for alpha0/alpha1, then certify the resulting profile.

    The ratio is reported even when no solution exists.
    """
    ratio = constraint_ratio(s)
    base, slope = q_parts(s)
    Q = ReducedPolynomial(base + slope.scale(ratio.coeff), q_unit(s))
    printed = printed_coupling_ratio(s)
    if Q.poly.is_zero:
        return SolvabilityReport(s, Status.NO_SOLUTION, ratio, Q, None,
                                 "degenerate: reduced polynomial vanishes (b_k = 0), forcing alpha0 = 0",
                                 printed_ratio=printed)
    cert = sign_on_domain(Q.poly)
    if not cert.is_definite:
        return SolvabilityReport(s, Status.NO_SOLUTION, ratio, Q, cert,
                                 "reduced polynomial has no definite sign on [0,2]",
                                 printed_ratio=printed)
    if cert.verdict is Verdict.NEGATIVE or ratio.sign() <= 0:
        return SolvabilityReport(s, Status.NO_SOLUTION, ratio, Q, cert,
                                 "positivity fails: need Q > 0 and alpha0 > 0",
                                 printed_ratio=printed)
    profile = build_profile(Q)
    boundary = boundary_check(profile)
    if not boundary.all_passed:
        return SolvabilityReport(s, Status.NO_SOLUTION, ratio, Q, cert, "boundary conditions fail",
                                 boundary, profile, printed_ratio=printed)
    if samples and not interior_positive(profile, samples):
        return SolvabilityReport(s, Status.NO_SOLUTION, ratio, Q, cert, "phi not positive inside (0,2)",
                                 boundary, profile, printed_ratio=printed)
    return SolvabilityReport(s, Status.SOLVABLE, ratio, Q, cert,
                             "Q > 0 on [0,2]; phi = N/Q meets all boundary conditions",
                             boundary, profile, samples, printed_ratio=printed)


SOLVABLE_FAMILIES = (
    Scenario(Case.GENERAL, 1, 0, 1),
    Scenario(Case.GENERAL, 2, 0, 1),
    Scenario(Case.GENERAL, 3, 0, 1),
    Scenario(Case.GENERAL, 4, 0, 1),
    Scenario(Case.EVEN, 2),
    Scenario(Case.EVEN, 4),
    Scenario(Case.ODD, 3),
)
