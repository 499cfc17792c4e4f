from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from calabi_ansatz.exact import Log3Linear, PiGraded
from calabi_ansatz.scenario import (
    Case,
    InvalidScenario,
    NotSolvable,
    Scenario,
    ak_bk,
    c_tilde,
    constants,
    constraint_ratio,
    coupling_ratio,
    lambda_constant,
    printed_c_tilde,
    printed_coupling_ratio,
    volume_constant,
)

from oracles import LN3, a1, ab_sym, constraint_sym, interval_contains, reduced_Q_sym, same, sym


@pytest.mark.parametrize("args", [
    (Case.EVEN, 3), (Case.EVEN, 0), (Case.ODD, 4), (Case.ODD, 1), (Case.GENERAL, 0, 0, 1),
    (Case.GENERAL, 2, 0, 0), ("diagonal", 2),
])
def test_invalid_scenarios(args):
    with pytest.raises(InvalidScenario):
        Scenario(*args)


def test_invalid_alpha1():
    with pytest.raises(InvalidScenario):
        Scenario(Case.EVEN, 2, alpha1=Fraction(-1))


def test_scenario_normalisation_and_json():
    s = Scenario("even", 4, 5, 7)
    assert s.case is Case.EVEN and (s.m1, s.m2) == (0, 0)
    g = Scenario(Case.GENERAL, 3, -2, 5, Fraction(7, 3))
    assert Scenario.from_json(g.to_json()) == g
    assert g.label == "general k=3 (m1,m2)=(-2,5)"


@pytest.mark.parametrize("k,expected", [(1, 8), (2, 52), (3, 480), (4, 5808)])
def test_volume_constant(k, expected):
    assert volume_constant(k) == PiGraded(expected, k + 1)
    t = sp.Symbol("t")
    assert sp.factorial(k + 1) * sp.integrate((1 + t) ** k, (t, 0, 2)) == expected


def test_ak_bk_examples():
    ab = ak_bk(1, 2, 3)
    assert ab.a == 1 and ab.b == 0
    ab = ak_bk(1, 0, 1)
    assert float(ab.a) == pytest.approx(0.20745, abs=1e-5)
    assert float(ab.b) == pytest.approx(0.37766, abs=1e-5)
    ab = ak_bk(2, 1, 0)
    assert same(sym(ab.a), 1 / (2 + 6 * LN3))
    assert same(sym(ab.b), -3 / (2 + 6 * LN3))
    with pytest.raises(InvalidScenario):
        ak_bk(1, 0, 0)


@given(st.integers(1, 6), st.integers(-5, 5), st.integers(-5, 5), st.integers(1, 4))
def test_ak_bk_scale_linearly(k, m1, m2, c):
    if (m1, m2) == (0, 0):
        return
    base, scaled = ak_bk(k, m1, m2), ak_bk(k, c * m1, c * m2)
    assert scaled.a == base.a * c and scaled.b == base.b * c


@given(st.integers(1, 5), st.integers(-4, 4), st.integers(-4, 4))
def test_ak_bk_against_sympy(k, m1, m2):
    if (m1, m2) == (0, 0):
        return
    ab = ak_bk(k, m1, m2)
    a, b = ab_sym(k, m1, m2)
    assert same(sym(ab.a), a) and same(sym(ab.b), b)
    lo_a, _ = ab.intervals(Fraction(1, 10**20))
    with mpmath.workdps(40):
        assert interval_contains(lo_a, mpmath.mpf(sp.N(a, 40)))


def test_lambda_constant():
    assert lambda_constant(Scenario(Case.EVEN, 2)) == PiGraded(3, -1)
    assert lambda_constant(Scenario(Case.ODD, 3)) == PiGraded(4, -1)
    lam = lambda_constant(Scenario(Case.GENERAL, 1, 0, 1))
    assert float(lam) == pytest.approx(2 * 0.207449 / (2 * 3.14159265), rel=1e-4)
    assert float(lam) == pytest.approx(0.06603, abs=1e-5)


@pytest.mark.parametrize("s", [
    Scenario(Case.EVEN, 2), Scenario(Case.EVEN, 4), Scenario(Case.EVEN, 6), Scenario(Case.ODD, 3), Scenario(Case.ODD, 5),
    Scenario(Case.GENERAL, 1, 0, 1), Scenario(Case.GENERAL, 2, 1, 1), Scenario(Case.GENERAL, 3, -1, 2),
])
def test_c_tilde_against_sympy(s):
    _, ct = reduced_Q_sym(s.case.value, s.k, s.m1, s.m2)
    assert same(sym(c_tilde(s)), ct / a1)


def test_c_tilde_published_forms():
    for s, v in [(Scenario(Case.EVEN, 2), Fraction(144, 13)), (Scenario(Case.ODD, 3), Fraction(108, 5)),
                 (Scenario(Case.EVEN, 4), Fraction(14000, 363))]:
        assert c_tilde(s) == printed_c_tilde(s) == PiGraded(v, -2)
    for k in (1, 2, 3, 4):
        s = Scenario(Case.GENERAL, k, 1, 2)
        assert printed_c_tilde(s) == c_tilde(s)


def test_c_tilde_is_linear_in_alpha1():
    s = Scenario(Case.ODD, 3, alpha1=Fraction(5, 2))
    assert c_tilde(s) == PiGraded(Fraction(108, 5) * Fraction(5, 2), -2)


@pytest.mark.parametrize("s", [
    Scenario(Case.EVEN, 2), Scenario(Case.EVEN, 4), Scenario(Case.ODD, 3),
    Scenario(Case.GENERAL, 1, 0, 1), Scenario(Case.GENERAL, 2, 0, 1), Scenario(Case.GENERAL, 3, 0, 1),
    Scenario(Case.GENERAL, 4, 0, 1), Scenario(Case.GENERAL, 2, 3, -1),
])
def test_coupling_ratio_against_sympy_and_published(s):
    got = coupling_ratio(s)
    assert same(sym(got), constraint_sym(s.case.value, s.k, s.m1, s.m2))
    assert printed_coupling_ratio(s) == got


def test_coupling_ratio_examples():
    assert coupling_ratio(Scenario(Case.EVEN, 2)) == PiGraded(16, 1)
    assert str(coupling_ratio(Scenario(Case.EVEN, 2))) == "32*pi"
    assert coupling_ratio(Scenario(Case.ODD, 3)) == PiGraded(Fraction(1216, 21), 2)
    assert coupling_ratio(Scenario(Case.EVEN, 4)) == PiGraded(Fraction(3760, 69), 3)
    b2 = ak_bk(1, 0, 1).b ** 2
    assert coupling_ratio(Scenario(Case.GENERAL, 1, 0, 1)) == PiGraded(8 * b2 * Log3Linear(-12, 13), 0)


@pytest.mark.parametrize("s", [Scenario(Case.GENERAL, 5, 0, 1), Scenario(Case.EVEN, 6), Scenario(Case.ODD, 5)])
def test_coupling_ratio_outside_range(s):
    with pytest.raises(NotSolvable):
        coupling_ratio(s)
    # the obstruction still has a root, it just does not give a solution
    assert same(sym(constraint_ratio(s)), constraint_sym(s.case.value, s.k, s.m1, s.m2))


def test_constants_bundle():
    c = constants(Scenario(Case.ODD, 3))
    assert c.C_k == PiGraded(480, 4) and c.R_k == Fraction(5, 63)
    assert c.flags == []
    g = constants(Scenario(Case.GENERAL, 1, 0, 1))
    assert g.a_k is not None and g.printed_ratio == g.ratio
