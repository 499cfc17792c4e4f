import csv
import io
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from calabi_ansatz.exact import PiGraded
from calabi_ansatz.geometry import (
    QuadratureFailure,
    alpha0_identity,
    gauge_volume,
    pde_residual,
    q_integral,
    reconstruct,
    rho_profile,
    to_csv,
    volume_identity,
)
from calabi_ansatz.profile import SOLVABLE_FAMILIES, build_profile, build_Q, solvability
from calabi_ansatz.scenario import Case, Scenario, coupling_ratio

EVEN2, ODD3, EVEN4 = Scenario(Case.EVEN, 2), Scenario(Case.ODD, 3), Scenario(Case.EVEN, 4)
TOL = Fraction(1, 10**12)


@pytest.fixture(scope="module")
def recon():
    out = {}
    for s in (EVEN2, ODD3, EVEN4, Scenario(Case.GENERAL, 1, 0, 1), Scenario(Case.GENERAL, 4, 0, 1)):
        rep = solvability(s, samples=0)
        out[s] = (rep, reconstruct(rep.profile, Fraction(1, 100), TOL, 512))
    return out


def test_even2_closed_forms(recon):
    _, r = recon[EVEN2]
    tau = r.tau
    assert np.max(np.abs(r.s - np.log(tau / (2 - tau)))) < 1e-10
    assert np.max(np.abs(r.f + 2 * np.log(2 - tau))) < 1e-10
    assert np.max(np.abs(r.phi - tau * (2 - tau) / 2)) < 1e-15


def test_anchor_and_monotone(recon):
    for rep, r in recon.values():
        i = int(np.argmin(np.abs(r.tau - 1.0)))
        # the anchor sits between grid nodes; s and f vanish there
        assert abs(r.s[i]) < 2 * (r.tau[1] - r.tau[0]) / r.phi_at_anchor
        assert r.is_monotone()
        assert np.all(r.s_err <= float(TOL)) and np.all(r.f_err <= float(TOL))


def test_odd3_against_mpmath(recon):
    rep, r = recon[ODD3]
    num = [float(c) for c in rep.profile.numerator.tau_coefficients()]
    q = rep.profile.denominator

    def phi(x):
        n = sum(c * x**j for j, c in enumerate(num))
        d = sum(float(c) * (1 + x) ** e for e, c in q.terms)
        return n / d

    with mpmath.workdps(30):
        for i in (0, 57, 300, 511):
            t = float(r.tau[i])
            assert abs(float(mpmath.quad(lambda x: 1 / phi(x), [1, t])) - r.s[i]) < 1e-10
            assert abs(float(mpmath.quad(lambda x: x / phi(x), [1, t])) - r.f[i]) < 1e-10


@pytest.mark.parametrize("key", [EVEN2, ODD3, EVEN4])
def test_residual_small(recon, key):
    rep, r = recon[key]
    assert pde_residual(r, rep.Q) < 1e-8


def test_residual_general_cases(recon):
    for s in (Scenario(Case.GENERAL, 1, 0, 1), Scenario(Case.GENERAL, 4, 0, 1)):
        rep, r = recon[s]
        assert pde_residual(r, rep.Q) < 1e-8


def test_residual_scale_invariant(recon):
    rep, r = recon[ODD3]
    base = pde_residual(r, rep.Q)
    for c in (Fraction(1, 1000), Fraction(37, 3)):
        Qc = rep.Q.scaled(c)
        rc = reconstruct(build_profile(Qc), Fraction(1, 100), TOL, 512)
        assert pde_residual(rc, Qc) == pytest.approx(base, abs=1e-12)
        rho, rho1 = rho_profile(rc, Qc)
        rho0, rho10 = rho_profile(r, rep.Q)
        assert rho1 == pytest.approx(rho10 / float(c), rel=1e-12)


def test_residual_detects_wrong_polynomial(recon):
    rep, r = recon[ODD3]
    wrong = build_Q(ODD3, coupling_ratio(ODD3) * PiGraded(Fraction(11, 10), 0))
    assert pde_residual(r, wrong) > 1e-3


def test_legendre_defect_shrinks_with_nodes():
    p = solvability(ODD3, samples=0).profile
    d = [reconstruct(p, Fraction(1, 10), TOL, n).legendre_defect() for n in (64, 128, 256)]
    assert d[0] > d[1] > d[2]
    assert d[1] / d[2] == pytest.approx(4, rel=0.2)  # second order


def test_quadrature_failure_near_the_ends():
    p = solvability(ODD3, samples=0).profile
    with pytest.raises(QuadratureFailure):
        reconstruct(p, Fraction(1, 10**12), Fraction(1, 10**15), 64)


@pytest.mark.parametrize("kwargs", [{"eps": 0}, {"eps": 1}, {"tol": 0}, {"nodes": 2}])
def test_reconstruct_validates(kwargs):
    p = solvability(EVEN2, samples=0).profile
    with pytest.raises(ValueError):
        reconstruct(p, **kwargs)


def test_grid_contains_anchor_exactly():
    p = solvability(EVEN2, samples=0).profile
    r = reconstruct(p, Fraction(1, 2), TOL, 5)
    assert r.grid == (Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(5, 4), Fraction(3, 2))
    assert r.s[2] == 0 and r.f[2] == 0


def test_csv(recon):
    rep, r = recon[EVEN2]
    rows = list(csv.reader(io.StringIO(to_csv(r, rep.Q))))
    assert rows[0] == ["tau", "phi", "s", "F", "f", "rho", "rho_rel_dev"]
    assert len(rows) == 513
    assert float(rows[1][0]) == pytest.approx(0.01)
    assert max(abs(float(row[6])) for row in rows[1:]) < 1e-8


@pytest.mark.parametrize("s", SOLVABLE_FAMILIES)
def test_alpha0_identity(s):
    rep = solvability(s, samples=0)
    alpha0 = rep.ratio * PiGraded(s.alpha1, 0)
    chk = alpha0_identity(rep.Q, s.k, alpha0)
    assert chk.holds
    # the normalisation of C~ makes the identity hold for every alpha0, so it
    # pins C~ against C_k; a mismatched alpha0 is rejected
    scale = PiGraded(Fraction(11, 10), 0)
    off = build_Q(s, rep.ratio * scale)
    assert alpha0_identity(off, s.k, alpha0 * scale).holds
    assert not alpha0_identity(off, s.k, alpha0).holds


def test_alpha0_identity_examples():
    Q = solvability(EVEN2, samples=0).Q
    assert q_integral(Q) == PiGraded(8, -2)
    assert PiGraded(2, 3) * q_integral(Q) == PiGraded(16, 1)


@pytest.mark.parametrize("k,c", [(1, 8), (2, 52), (3, 480), (4, 5808), (7, 7 * 6 * 5 * 4 * 3 * 2 * (3**8 - 1))])
def test_volume_identity(k, c):
    chk = volume_identity(k)
    assert chk.holds and chk.rhs == PiGraded(c, k + 1)


def test_gauge_volume_even2(recon):
    rep, r = recon[EVEN2]
    alpha0 = rep.ratio
    # phi(1) = 1/2, Q(1) = 4/(2pi)^2, so rho(1) = (2pi)^2/2 and C' = alpha0 (2pi)^2/4
    expected = 32 * np.pi * (2 * np.pi) ** 2 / 4
    assert gauge_volume(r, rep.Q, 2, alpha0) == pytest.approx(expected, rel=1e-12)
