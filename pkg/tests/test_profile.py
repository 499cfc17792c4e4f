import json
from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from calabi_ansatz.exact import PiGraded
from calabi_ansatz.poly import LaurentPoly, Verdict, compute_R
from calabi_ansatz.profile import (
    SOLVABLE_FAMILIES,
    PoleInDomain,
    ReducedPolynomial,
    Status,
    boundary_check,
    build_profile,
    build_Q,
    factored_Q,
    interior_positive,
    obstruction_integral,
    solvability,
)
from calabi_ansatz.scenario import Case, Scenario, coupling_ratio

from oracles import a0, a1, reduced_Q_sym, same, sym, sym_poly, t, u

EVEN2, ODD3, EVEN4 = Scenario(Case.EVEN, 2), Scenario(Case.ODD, 3), Scenario(Case.EVEN, 4)
ELEVEN_TENTHS = PiGraded(Fraction(11, 10), 0)


def _phi_sym(poly):
    q = sym_poly(poly).subs(u, 1 + t)
    x = sp.Symbol("x", positive=True)
    return sp.integrate(sp.expand((1 - x) * q.subs(t, x)), (x, 0, t)) / q


# -- reduced polynomial -----------------------------------------------------

def test_even2_Q_is_constant():
    Q = build_Q(EVEN2, coupling_ratio(EVEN2))
    assert Q.poly == LaurentPoly.constant(4)
    assert Q.unit == PiGraded(1, -2)


def test_odd3_Q_factored():
    Q = build_Q(ODD3, coupling_ratio(ODD3))
    assert Q.poly == LaurentPoly({1: 12, 3: Fraction(-12 * 5, 63)})
    assert factored_Q(ODD3) == Q


@pytest.mark.parametrize("s", SOLVABLE_FAMILIES)
def test_factored_form_at_constraint(s):
    Q = build_Q(s, coupling_ratio(s))
    F = factored_Q(s)
    assert F == Q
    lead = F.poly.coeff(s.k) / F.poly.coeff(s.k - 2)
    assert lead == -compute_R(s.k)


def test_build_Q_validates_ratio():
    with pytest.raises(ValueError):
        build_Q(ODD3, PiGraded(1, 0))  # wrong grade
    with pytest.raises(ValueError):
        build_Q(ODD3, PiGraded(-1, 2))


# -- obstruction ------------------------------------------------------------

def test_obstruction_of_constant_vanishes():
    assert obstruction_integral(LaurentPoly.constant(Fraction(7, 3))) == 0


@pytest.mark.parametrize("s", SOLVABLE_FAMILIES)
def test_obstruction_zero_at_constraint(s):
    Q = build_Q(s, coupling_ratio(s))
    assert obstruction_integral(Q) == 0
    assert sp.simplify(sp.integrate((2 - u) * sym_poly(Q.poly), (u, 1, 3))) == 0


@pytest.mark.parametrize("s", [EVEN2, ODD3, EVEN4])
def test_obstruction_off_constraint_has_sign_of_A_k(s):
    Q = build_Q(s, coupling_ratio(s) * ELEVEN_TENTHS)
    off = obstruction_integral(Q)
    # d/d(alpha0) adds a positive multiple of u^k, and int (2-u) u^k < 0
    assert off.sign() == -1
    ref = sp.integrate((2 - u) * sym_poly(Q.poly), (u, 1, 3))
    assert same(sym(off.coeff), ref)


def test_even2_off_constraint_exact_residue():
    Q = build_Q(EVEN2, coupling_ratio(EVEN2) * ELEVEN_TENTHS)
    qsym, _ = reduced_Q_sym("even", 2)
    ref = sp.expand(qsym.subs(a0, sp.Rational(11, 10) * 32 * sp.pi * a1) / (a1 / (2 * sp.pi) ** 2))
    assert sp.expand(sym_poly(Q.poly) - ref) == 0
    assert Q.poly == LaurentPoly({0: 4, 2: Fraction(6, 65)})
    assert obstruction_integral(Q.poly) == Fraction(6, 65) * Fraction(-8, 3)
    report = boundary_check(build_profile(Q))
    assert not report.all_passed
    # phi(2) = obstruction / Q(3)
    assert report["phi(2)"].value == Fraction(-16, 65) / (4 + Fraction(54, 65))
    assert report["phi(0)"].passed and report["phi'(0)"].passed


# -- profile ----------------------------------------------------------------

def test_constant_Q_profile():
    p = build_profile(LaurentPoly.constant(Fraction(5, 2)))
    assert p.tau_coefficients() == [0, 1, Fraction(-1, 2)]
    assert p.phi(Fraction(1)) == Fraction(1, 2)


def test_odd3_phi_at_one_exact():
    p = solvability(ODD3, samples=0).profile
    ref = _phi_sym(p.denominator).subs(t, 1)
    assert sp.nsimplify(ref) == sym(p.phi(1))
    assert p.phi(1) == Fraction(71, 172)  # ln3-free
    assert not p.has_log


@given(st.fractions(min_value=Fraction(1, 100), max_value=1000, max_denominator=100))
def test_profile_scale_invariance(c):
    Q = build_Q(ODD3, coupling_ratio(ODD3))
    p, q = build_profile(Q), build_profile(Q.scaled(c))
    for tau in (Fraction(1, 4), Fraction(1), Fraction(3, 2)):
        assert p.phi(tau) == q.phi(tau)
        assert p.dphi(tau) == q.dphi(tau)


def test_pole_in_domain():
    with pytest.raises(PoleInDomain) as info:
        build_profile(LaurentPoly({0: 1, 2: -compute_R(5)}))
    assert info.value.certificate.verdict is Verdict.SIGN_CHANGE


def test_log_profile_boundary_values_exact():
    p = solvability(Scenario(Case.GENERAL, 1, 0, 1), samples=0).profile
    assert p.has_log
    assert p.phi(0) == 0 and p.phi(2) == 0
    with pytest.raises(ValueError):
        p.phi(1)
    # interior value by enclosure, against sympy
    iv = p.phi_enclosure(Fraction(1, 2), Fraction(1, 10**25))
    ref = _phi_sym(p.denominator).subs(t, sp.Rational(1, 2))
    with mpmath.workdps(50):
        val = mpmath.mpf(sp.N(ref, 50))
        assert mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= val <= mpmath.mpf(iv.hi.numerator) / iv.hi.denominator


@pytest.mark.parametrize("s", SOLVABLE_FAMILIES)
def test_boundary_suite_and_sympy(s):
    rep = solvability(s, samples=0)
    report = boundary_check(rep.profile)
    assert report.all_passed
    phi = _phi_sym(rep.profile.denominator)
    assert sp.simplify(sp.diff(phi, t).subs(t, 2)) == -1
    assert sp.simplify(sp.diff(phi, t).subs(t, 0)) == 1


@pytest.mark.parametrize("s", [EVEN2, EVEN4, ODD3, Scenario(Case.GENERAL, 2, 0, 1)])
def test_interior_positive(s):
    assert interior_positive(solvability(s, samples=0).profile, samples=200)


# -- solvability ------------------------------------------------------------

def test_solvability_verdicts():
    rep = solvability(ODD3, samples=100)
    assert rep.status is Status.SOLVABLE and rep.solvable
    assert rep.ratio == PiGraded(Fraction(1216, 21), 2)
    assert rep.interior_checked == 100
    rep = solvability(Scenario(Case.GENERAL, 5, 0, 1), samples=0)
    assert rep.status is Status.NO_SOLUTION
    lo, hi = rep.certificate.witness
    assert lo * lo <= Fraction(3655, 441) <= hi * hi
    assert abs(float(lo) - 2.879) < 1e-3
    assert solvability(Scenario(Case.EVEN, 6), samples=0).status is Status.NO_SOLUTION


def test_degenerate_twist():
    rep = solvability(Scenario(Case.GENERAL, 1, 2, 3), samples=0)
    assert rep.status is Status.NO_SOLUTION
    assert "degenerate" in rep.reason
    assert rep.Q.poly.is_zero


def test_report_json_round_trips_through_text():
    rep = solvability(Scenario(Case.GENERAL, 2, 0, 1), samples=10)
    d = json.loads(json.dumps(rep.to_json()))
    assert d["verdict"] == "Solvable"
    assert d["matches_published_ratio"] is True
    assert [b["passed"] for b in d["boundary"]] == [True] * 4
    assert d["positivity"]["verdict"] == "PositiveOn[1,3]"
    assert ReducedPolynomial(LaurentPoly.from_json(d["Q"]["poly"]), PiGraded(1, -2)) == rep.Q
