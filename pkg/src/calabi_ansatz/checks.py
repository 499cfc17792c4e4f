"""Registry of the end-to-end verification checks run by ``verify``.

Each check returns a list of detail lines and raises ``CheckFailed`` on the
first violated assertion.  Timing is measured by the runner and compared
against the check's budget.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .exact import Log3Linear, Log3Rational, PiGraded, enclose, exact_sign
from .geometry import alpha0_identity, pde_residual, reconstruct, volume_identity
from .poly import LaurentPoly, Verdict, a_closed_form, compute_R, moment_integral, rk_bounds, sign_on_domain
from .profile import (
    SOLVABLE_FAMILIES,
    Status,
    boundary_check,
    build_profile,
    build_Q,
    obstruction_integral,
    solvability,
)
from .scenario import Case, Scenario, ak_bk, c_tilde, coupling_ratio, printed_c_tilde, printed_coupling_ratio, volume_constant


class CheckFailed(AssertionError):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CheckFailed(msg)


@dataclass
class CheckResult:
    id: str
    title: str
    passed: bool
    seconds: float
    budget: float
    details: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.error}]" if self.error else ""
        return f"{mark}  {self.id:<22} {self.seconds:7.3f}s / {self.budget:g}s  {self.title}{extra}"

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "seconds": round(self.seconds, 4),
                "budget_seconds": self.budget, "details": self.details, "error": self.error}


@dataclass(frozen=True)
class Check:
    id: str
    title: str
    budget: float
    run: Callable[[], list[str]]

    def __call__(self) -> CheckResult:
        start = time.perf_counter()
        error = None
        details: list[str] = []
        try:
            details = self.run()
        except CheckFailed as exc:
            error = str(exc)
        elapsed = time.perf_counter() - start
        if error is None and elapsed >= self.budget:
            error = f"over time budget ({elapsed:.2f}s)"
        return CheckResult(self.id, self.title, error is None, elapsed, self.budget, details, error)


# --------------------------------------------------------------------------


def _r_table() -> list[str]:
    r1 = compute_R(1)
    _require(r1 == Log3Linear(3, -3), f"R_1 = {r1}")
    iv = r1.enclose(Fraction(1, 10**12))
    _require(abs(float(iv.mid) + 0.29584) < 1e-5, f"R_1 encloses {iv}")
    expected = {2: Fraction(0), 3: Fraction(5, 63), 4: Fraction(5, 46)}
    for k, v in expected.items():
        _require(compute_R(k) == v, f"R_{k} = {compute_R(k)}")
    return [f"R_1 = {r1} ~ {float(iv.mid):.6f}"] + [f"R_{k} = {v}" for k, v in expected.items()]


def _lemma_bounds() -> list[str]:
    mismatched = []
    for k in range(5, 201):
        b = rk_bounds(k)
        _require(b.upper_ok and b.lower_ok, f"bounds fail at k={k}")
        if not b.printed_upper_matches:
            mismatched.append(k)
    r1000 = a_closed_form(998) / a_closed_form(1000)
    _require(abs(r1000 - Fraction(1, 9)) < Fraction(1, 1000), "R_1000 not within 1e-3 of 1/9")
    lines = ["1 > R_k > 1/9 for k = 5..200", f"|R_1000 - 1/9| = {float(abs(r1000 - Fraction(1, 9))):.3e}"]
    if mismatched:
        lines.append(f"expanded form of A_k - A_(k-2) differs from exact value for {len(mismatched)} k (sign unaffected)")
    return lines


def _a_closed_form() -> list[str]:
    for k in range(1, 31):
        _require(moment_integral(k) == a_closed_form(k), f"A_{k} mismatch")
    return ["A_k closed form == moment integral, k = 1..30"]


def _volume_constants() -> list[str]:
    expected = {1: 8, 2: 52, 3: 480, 4: 5808}
    for k, c in expected.items():
        _require(volume_constant(k) == PiGraded(c, k + 1), f"C_{k} = {volume_constant(k)}")
        _require(volume_identity(k).holds, f"volume integral disagrees at k={k}")
    return [f"C_{k} = {volume_constant(k)}" for k in expected]


_C_TILDE = {
    Scenario(Case.EVEN, 2): Fraction(144, 13),
    Scenario(Case.ODD, 3): Fraction(108, 5),
    Scenario(Case.EVEN, 4): Fraction(14000, 363),
}


def _c_tilde() -> list[str]:
    lines = []
    for s, v in _C_TILDE.items():
        got = c_tilde(s)
        _require(got == PiGraded(v, -2), f"{s.label}: C~ = {got}")
        _require(printed_c_tilde(s) == got, f"{s.label}: published form differs")
        lines.append(f"{s.label}: C~ = {got} * alpha1")
    return lines


_RATIOS = {
    Scenario(Case.EVEN, 2): PiGraded(16, 1),
    Scenario(Case.ODD, 3): PiGraded(Fraction(1216, 21), 2),
    Scenario(Case.EVEN, 4): PiGraded(Fraction(3760, 69), 3),
}


def _coupling() -> list[str]:
    lines = []
    for s, v in _RATIOS.items():
        got = coupling_ratio(s)
        _require(got == v, f"{s.label}: ratio {got}")
        _require(printed_coupling_ratio(s) == got, f"{s.label}: published form differs")
        lines.append(f"{s.label}: alpha0/alpha1 = {got}")
    s = Scenario(Case.GENERAL, 1, 0, 1)
    got = coupling_ratio(s)
    b = ak_bk(1, 0, 1).b
    closed = 8 * b * b * (13 * Log3Rational.coerce(Log3Linear.ln3()) - 12)
    _require(got == PiGraded(closed, 0), "k=1 ratio differs from 8 b^2 (13 ln3 - 12)")
    iv = enclose(got, Fraction(1, 10**7))
    _require(iv.width < Fraction(1, 10**6), "interval too wide")
    _require(iv.contains(closed.enclose(Fraction(1, 10**20)).mid), "interval misses closed form")
    _require(abs(float(iv.mid) - 2.6038) < 5e-4, f"k=1 ratio {float(iv.mid)}")
    lines.append(f"{s.label}: alpha0/alpha1 in {iv} ~ {float(iv.mid):.7f}")
    return lines


def _profile_closed_form() -> list[str]:
    p = solvability(Scenario(Case.EVEN, 2), samples=0).profile
    coeffs = p.tau_coefficients()
    _require(coeffs == [0, 1, Fraction(-1, 2)], f"phi coefficients {coeffs}")
    return ["even k=2: phi = tau - tau^2/2"]


def _boundary_suite() -> list[str]:
    lines = []
    for s in SOLVABLE_FAMILIES:
        rep = solvability(s, samples=0)
        _require(rep.boundary is not None and rep.boundary.all_passed, f"{s.label}: boundary failure")
        lines.append(f"{s.label}: " + ", ".join(f"{c.name}={c.value}" for c in rep.boundary.conditions))
    return lines


NO_SOLUTION_SCENARIOS = (
    *(Scenario(Case.GENERAL, k, 0, 1) for k in (5, 6, 7, 8)),
    Scenario(Case.EVEN, 6),
    Scenario(Case.EVEN, 8),
    Scenario(Case.ODD, 5),
    Scenario(Case.ODD, 7),
)


def _no_solution() -> list[str]:
    lines = []
    for s in NO_SOLUTION_SCENARIOS:
        rep = solvability(s, samples=0)
        _require(rep.status is Status.NO_SOLUTION, f"{s.label}: expected NoSolution")
        cert = rep.certificate
        _require(cert is not None and cert.verdict is Verdict.SIGN_CHANGE, f"{s.label}: no sign change")
        lo, hi = cert.witness
        _require(1 < lo < hi < 3, f"{s.label}: witness outside (1,3)")
        _require(exact_sign(rep.Q.poly(lo)) * exact_sign(rep.Q.poly(hi)) < 0, f"{s.label}: no sign flip")
        if s.k == 5:
            target = Fraction(3655, 441)
            _require(lo * lo <= target <= hi * hi, f"{s.label}: bracket misses sqrt(3655/441)")
        lines.append(f"{s.label}: sign change in [{float(lo):.10f}, {float(hi):.10f}]")
    return lines


def _alpha0_identity() -> list[str]:
    lines = []
    for s in SOLVABLE_FAMILIES:
        rep = solvability(s, samples=0)
        alpha0 = rep.ratio * PiGraded(s.alpha1, 0)
        chk = alpha0_identity(rep.Q, s.k, alpha0)
        _require(chk.holds, f"{s.label}: {chk.lhs} != {chk.rhs}")
        lines.append(f"{s.label}: 2(2pi)^{s.k + 1} int Q = {chk.lhs}")
    return lines


def _reconstruction() -> list[str]:
    lines = []
    for s in (Scenario(Case.EVEN, 2), Scenario(Case.ODD, 3), Scenario(Case.EVEN, 4)):
        rep = solvability(s, samples=0)
        r = reconstruct(rep.profile, Fraction(1, 100), Fraction(1, 10**12), 512)
        res = pde_residual(r, rep.Q)
        _require(res < 1e-8, f"{s.label}: residual {res:.3e}")
        _require(r.is_monotone(), f"{s.label}: s not increasing")
        lines.append(f"{s.label}: max|rho/rho(1) - 1| = {res:.2e}")
        if s.k == 2:
            dev = float(np.max(np.abs(r.s - np.log(r.tau / (2 - r.tau)))))
            _require(dev < 1e-8, f"s deviates from ln(tau/(2-tau)) by {dev:.3e}")
            lines.append(f"{s.label}: max|s - ln(tau/(2-tau))| = {dev:.2e}")
    return lines


def random_polynomials(count: int = 100, seed: int = 20240531) -> list[LaurentPoly]:
    """Rational polynomials of degree <= 12; half have roots planted in (1, 3)."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        deg = rng.randint(1, 12)
        if i % 2:
            coeffs = {e: Fraction(rng.randint(-60, 60), rng.randint(1, 9)) for e in range(deg + 1)}
            p = LaurentPoly(coeffs)
        else:
            p = LaurentPoly.constant(Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 5)))
            for _ in range(deg):
                if rng.random() < 0.5:
                    r = Fraction(rng.randint(0, 400), 100)
                    p = p * LaurentPoly({1: 1, 0: -r})
                else:
                    c = Fraction(rng.randint(1, 30), 10)
                    p = p * LaurentPoly({2: 1, 0: c})
        if p.is_zero:
            p = LaurentPoly.constant(1)
        out.append(p)
    return out


def sampled_signs(p: LaurentPoly, points: int = 10**6) -> set[int]:
    u = np.linspace(1.0, 3.0, points)
    coefs, lo = p.float_coeffs()
    vals = np.polyval(coefs[::-1], u) * u**lo
    return set(np.sign(vals).astype(int).tolist()) - {0}


def _properties() -> list[str]:
    lines = []
    # scale invariance of the profile
    s = Scenario(Case.ODD, 3)
    Q = solvability(s, samples=0).Q.poly
    base = build_profile(Q)
    for c in (Fraction(1, 7), Fraction(5), Fraction(22, 3)):
        scaled = build_profile(Q.scale(c))
        for tau in (Fraction(1, 3), Fraction(1), Fraction(7, 4)):
            _require(scaled.phi(tau) == base.phi(tau), "phi changes under Q -> cQ")
    lines.append("phi invariant under Q -> cQ")
    # obstruction at and off the constraint
    for s in (Scenario(Case.EVEN, 2), Scenario(Case.ODD, 3), Scenario(Case.EVEN, 4)):
        ratio = coupling_ratio(s)
        _require(not obstruction_integral(build_Q(s, ratio)), f"{s.label}: obstruction nonzero at constraint")
        off = obstruction_integral(build_Q(s, ratio * PiGraded(Fraction(11, 10), 0)))
        # raising alpha0 raises the u^k coefficient, whose weighted moment A_k is negative
        _require(off.sign() == moment_integral(s.k).sign() == -1, f"{s.label}: obstruction sign at 1.1x")
        _require(not boundary_check(build_profile(build_Q(s, ratio * PiGraded(Fraction(11, 10), 0)))).all_passed,
                 f"{s.label}: boundary passes off constraint")
    lines.append("obstruction = 0 at constraint, < 0 at 1.1x")
    # Sturm against dense sampling
    polys = random_polynomials()
    changes = 0
    for p in polys:
        cert = sign_on_domain(p, method="sturm")
        seen = sampled_signs(p)
        if cert.verdict is Verdict.POSITIVE:
            _require(seen == {1}, f"Sturm positive, sampling saw {seen}: {p}")
        elif cert.verdict is Verdict.NEGATIVE:
            _require(seen == {-1}, f"Sturm negative, sampling saw {seen}: {p}")
        else:
            changes += cert.verdict is Verdict.SIGN_CHANGE
            _require(seen != {1} and seen != {-1} or cert.verdict is Verdict.TOUCHES_ZERO,
                     f"Sturm {cert.verdict.value}, sampling saw only {seen}: {p}")
    lines.append(f"Sturm agrees with 10^6-point sampling on {len(polys)} polynomials ({changes} sign changes)")
    return lines


CHECKS: tuple[Check, ...] = (
    Check("R-table", "R_1..R_4 exact", 1.0, _r_table),
    Check("lemma-bounds", "1 > R_k > 1/9 for k=5..200; R_1000 near 1/9", 5.0, _lemma_bounds),
    Check("A-closed-form", "closed form of A_k, k=1..30", 1.0, _a_closed_form),
    Check("volume-constants", "C_1..C_4", 1.0, _volume_constants),
    Check("c-tilde", "C~ for even 2, odd 3, even 4", 1.0, _c_tilde),
    Check("coupling-constraints", "alpha0/alpha1 from phi(2)=0", 1.0, _coupling),
    Check("profile-closed-form", "even k=2 profile tau - tau^2/2", 1.0, _profile_closed_form),
    Check("boundary-suite", "four boundary conditions, solvable families", 1.0, _boundary_suite),
    Check("no-solution", "sign-change certificates for k beyond range", 2.0, _no_solution),
    Check("alpha0-identity", "alpha0 = 2(2pi)^(k+1) int Q", 1.0, _alpha0_identity),
    Check("reconstruction", "Legendre reconstruction residual", 10.0, _reconstruction),
    Check("properties", "scale invariance, obstruction, Sturm vs sampling", 30.0, _properties),
)

CHECK_IDS = tuple(c.id for c in CHECKS)


def get_check(check_id: str) -> Check:
    for c in CHECKS:
        if c.id == check_id:
            return c
    raise KeyError(check_id)


def run_checks(ids: list[str] | None = None) -> list[CheckResult]:
    selected = CHECKS if not ids else tuple(get_check(i) for i in ids)
    return [c() for c in selected]
