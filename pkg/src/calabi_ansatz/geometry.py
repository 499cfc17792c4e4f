"""Legendre reconstruction of s, F, f and the global consistency identities.

With ``s(tau) = int_1^tau dt/phi`` and ``F(tau) = int_1^tau s dt`` one has
``F = tau s - g`` where ``g(tau) = int_1^tau t/phi dt``, so the Legendre dual
``f = s tau - F`` is simply ``g``.  Both integrals are accumulated from the
gauge anchor ``tau = 1`` with adaptive Gauss-Kronrod panels.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from . import _kernels
from .exact import PiGraded, enclose, to_json
from .poly import LaurentPoly
from .profile import MomentumProfile, ReducedPolynomial
from .scenario import volume_constant

DEFAULT_EPS = Fraction(1, 100)
DEFAULT_TOL = Fraction(1, 10**12)
DEFAULT_NODES = 512


class QuadratureFailure(RuntimeError):
    """Adaptive quadrature hit its depth limit before meeting the tolerance."""


@dataclass(frozen=True)
class Reconstruction:
    grid: tuple[Fraction, ...]
    tau: np.ndarray
    phi: np.ndarray
    s: np.ndarray
    F: np.ndarray
    f: np.ndarray
    s_err: np.ndarray
    f_err: np.ndarray
    tol: Fraction
    eps: Fraction
    phi_at_anchor: float
    backend: str

    @property
    def F_err(self) -> np.ndarray:
        return self.tau * self.s_err + self.f_err

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.s) > 0))

    def legendre_defect(self) -> float:
        """Largest ``|d^2 f/ds^2 - phi|`` from three-point differences on the grid."""
        s, f = self.s, self.f
        h0 = s[1:-1] - s[:-2]
        h1 = s[2:] - s[1:-1]
        d2 = 2 * (h0 * f[2:] - (h0 + h1) * f[1:-1] + h1 * f[:-2]) / (h0 * h1 * (h0 + h1))
        return float(np.max(np.abs(d2 - self.phi[1:-1])))


def _grid(eps: Fraction, nodes: int) -> tuple[Fraction, ...]:
    span = 2 - 2 * eps
    return tuple(eps + span * Fraction(i, nodes - 1) for i in range(nodes))


def reconstruct(p: MomentumProfile, eps: Any = DEFAULT_EPS, tol: Any = DEFAULT_TOL,
                nodes: int = DEFAULT_NODES, backend: str | None = None) -> Reconstruction:
    """Tabulate ``s, F, f`` on ``nodes`` equally spaced points of ``[eps, 2 - eps]``.

    The accumulated quadrature error estimate at every node stays below ``tol``
    for ``s`` and ``f``.  Raises QuadratureFailure when the adaptive rule runs
    out of depth, which happens when ``eps`` is too small for ``tol``.
    """
    eps, tol = Fraction(eps), Fraction(tol)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if nodes < 3:
        raise ValueError("need at least three nodes")
    backend = backend or _kernels.BACKEND
    grid = _grid(eps, nodes)
    tau = np.array([float(t) for t in grid])

    # integrate over the grid with the anchor spliced in
    anchor = int(np.searchsorted(tau, 1.0))
    has_anchor = anchor < nodes and tau[anchor] == 1.0
    edges = tau if has_anchor else np.insert(tau, anchor, 1.0)
    arrays = p.float_arrays()
    t = float(tol) / 2
    out = []
    for power in (0, 1):
        vals, errs, ok = _kernels.integrate_segments(edges, power, *arrays, t, backend)
        if not ok:
            raise QuadratureFailure(f"tolerance {float(tol):g} not met on [{float(eps)}, {float(2 - eps)}]")
        cum = np.concatenate([[0.0], np.cumsum(vals)])
        cerr = np.concatenate([[0.0], np.cumsum(errs)])
        cum -= cum[anchor]
        cerr = np.abs(cerr - cerr[anchor])
        if not has_anchor:
            cum = np.delete(cum, anchor)
            cerr = np.delete(cerr, anchor)
        out.append((cum, cerr))
    (s, s_err), (g, g_err) = out
    phi = _kernels.phi_eval(tau, *arrays, backend)
    phi1 = float(_kernels.phi_eval(np.array([1.0]), *arrays, backend)[0])
    return Reconstruction(grid, tau, phi, s, tau * s - g, g, s_err, g_err, tol, eps, phi1, backend)


def _q_values(Q: LaurentPoly | ReducedPolynomial, u: np.ndarray) -> np.ndarray:
    poly = Q.poly if isinstance(Q, ReducedPolynomial) else Q
    coefs, lo = poly.float_coeffs()
    return _kernels.laurent_eval(coefs, lo, u)


def rho_profile(r: Reconstruction, Q: LaurentPoly | ReducedPolynomial) -> tuple[np.ndarray, float]:
    """``rho = e^(s(1 - tau) + F) / (phi Q)`` on the grid, and its gauge value at tau = 1."""
    q = _q_values(Q, 1.0 + r.tau)
    rho = np.exp(r.s * (1.0 - r.tau) + r.F) / (r.phi * q)
    rho1 = 1.0 / (r.phi_at_anchor * float(_q_values(Q, np.array([2.0]))[0]))
    return rho, rho1


def pde_residual(r: Reconstruction, Q: LaurentPoly | ReducedPolynomial) -> float:
    """``max |rho / rho(1) - 1|``; zero up to quadrature error for a true solution."""
    rho, rho1 = rho_profile(r, Q)
    return float(np.max(np.abs(rho / rho1 - 1.0)))


def to_csv(r: Reconstruction, Q: LaurentPoly | ReducedPolynomial) -> str:
    rho, rho1 = rho_profile(r, Q)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "phi", "s", "F", "f", "rho", "rho_rel_dev"])
    for i in range(len(r.tau)):
        w.writerow([repr(float(x)) for x in (r.tau[i], r.phi[i], r.s[i], r.F[i], r.f[i], rho[i], rho[i] / rho1 - 1.0)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# exact identities


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: Any
    rhs: Any

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": to_json(self.lhs), "rhs": to_json(self.rhs),
                "lhs_text": str(self.lhs), "rhs_text": str(self.rhs), "holds": self.holds}


def q_integral(Q: ReducedPolynomial) -> PiGraded:
    return Q.unit * PiGraded(Q.poly.integral_over_domain(), 0)


def alpha0_identity(Q: ReducedPolynomial, k: int, alpha0: PiGraded) -> IdentityCheck:
    """``alpha0 == 2 (2 pi)^(k+1) int_0^2 Q dtau``, compared exactly.

    Integrating the reduced equation against ``dtau/phi`` turns ``e^(s-f)``
    into the fiber volume, which cancels against the normalizing constant.
    """
    lhs = PiGraded(2, k + 1) * q_integral(Q)
    return IdentityCheck(f"alpha0 identity k={k}", lhs, alpha0)


def volume_identity(k: int) -> IdentityCheck:
    """``(k+1)! (2 pi)^(k+1) int_0^2 (1+tau)^k dtau`` against the closed-form C_k."""
    lhs = PiGraded(math.factorial(k + 1) * LaurentPoly({k: 1}).integral_over_domain(), k + 1)
    return IdentityCheck(f"volume k={k}", lhs, volume_constant(k))


def gauge_volume(r: Reconstruction, Q: ReducedPolynomial, k: int, alpha0: PiGraded) -> float:
    """Numeric ``C'_k`` in the gauge ``s(1) = f(1) = 0``.

    In this gauge ``e^(s-f) = rho(1) phi Q`` and ``alpha0 / (2 C') = 1 / rho(1)``
    once Q carries its unit.
    """
    unit = float(enclose(Q.unit, Fraction(1, 10**20)).mid)
    rho1 = 1.0 / (r.phi_at_anchor * float(_q_values(Q, np.array([2.0]))[0]) * unit)
    return float(enclose(alpha0, Fraction(1, 10**20)).mid) * rho1 / 2
