"""Floating-point hot loops: polynomial grids and Gauss-Kronrod quadrature.

Each kernel has a loop form compiled with ``numba.njit`` and a vectorised
numpy form.  Numba is used when importable unless ``ANSATZ_DISABLE_NUMBA`` is
set to a true value; both paths compute the same quantities.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised through both backends
    import numba
except ImportError:  # pragma: no cover
    numba = None

_FLAG = os.environ.get("ANSATZ_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")

# Kronrod 15-point abscissae (descending, last is the centre) and weights;
# the Gauss 7-point rule uses the odd-indexed abscissae plus the centre.
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

MAX_DEPTH = 40
MAX_PANELS = 1 << 20
# a panel whose error estimate is this small relative to int |f| is at the
# roundoff floor; splitting further cannot improve it
ROUNDOFF = 50 * np.finfo(float).eps


# --------------------------------------------------------------------------
# loop forms (compiled by numba when enabled)


def _ipow(x, n):
    # small integer powers by repeated multiplication; pow() is far slower
    r = 1.0
    for _ in range(abs(n)):
        r *= x
    return r if n >= 0 else 1.0 / r


def _laurent_eval_loop(coefs, min_exp, x):
    out = np.empty(x.shape[0])
    n = coefs.shape[0]
    for i in range(x.shape[0]):
        xi = x[i]
        acc = 0.0
        for j in range(n - 1, -1, -1):
            acc = acc * xi + coefs[j]
        out[i] = acc * _ipow(xi, min_exp)
    return out


def _phi_scalar(t, nlr, log_coeff, den, den_min):
    # N is expanded about whichever endpoint is nearer, where it vanishes;
    # row 0 of nlr holds the tau expansion, row 1 the (2 - tau) one.  Picking
    # the row instead of branching around two loops keeps this vectorisable.
    left = t <= 1.0
    x = t if left else 2.0 - t
    row = 0 if left else 1
    acc = 0.0
    for j in range(nlr.shape[1] - 1, -1, -1):
        acc = acc * x + nlr[row, j]
    if log_coeff != 0.0:
        acc += log_coeff * np.log1p(t if left else -x / 3.0)
    u = 1.0 + t
    q = 0.0
    for j in range(den.shape[0] - 1, -1, -1):
        q = q * u + den[j]
    return acc / (q * _ipow(u, den_min))


def _phi_eval_loop(tau, nlr, log_coeff, den, den_min):
    out = np.empty(tau.shape[0])
    for i in range(tau.shape[0]):
        out[i] = _phi_scalar(tau[i], nlr, log_coeff, den, den_min)
    return out


def _gk15(a, b, power, nlr, log_coeff, den, den_min):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = _ipow(c, power) / _phi_scalar(c, nlr, log_coeff, den, den_min)
    rk = fc * WGK[7]
    rg = fc * WG[3]
    ra = abs(fc) * WGK[7]
    for j in range(7):
        dx = h * XGK[j]
        t1 = c - dx
        t2 = c + dx
        f1 = _ipow(t1, power) / _phi_scalar(t1, nlr, log_coeff, den, den_min)
        f2 = _ipow(t2, power) / _phi_scalar(t2, nlr, log_coeff, den, den_min)
        rk += WGK[j] * (f1 + f2)
        ra += WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            rg += WG[j // 2] * (f1 + f2)
    return rk * h, abs((rk - rg) * h), ra * abs(h)


def _integrate_segments_loop(edges, power, nlr, log_coeff, den, den_min, tol):
    nseg = edges.shape[0] - 1
    vals = np.zeros(nseg)
    errs = np.zeros(nseg)
    total = abs(edges[-1] - edges[0])
    ok = True
    panels = 0
    stack_a = np.empty(2 * MAX_DEPTH + 2)
    stack_b = np.empty(2 * MAX_DEPTH + 2)
    stack_d = np.empty(2 * MAX_DEPTH + 2, dtype=np.int64)
    for s in range(nseg):
        top = 0
        stack_a[0] = edges[s]
        stack_b[0] = edges[s + 1]
        stack_d[0] = 0
        top = 1
        while top > 0:
            top -= 1
            a = stack_a[top]
            b = stack_b[top]
            d = stack_d[top]
            v, e, va = _gk15(a, b, power, nlr, log_coeff, den, den_min)
            panels += 1
            budget = tol * abs(b - a) / total
            if e <= budget or e <= ROUNDOFF * va or d >= MAX_DEPTH or panels >= MAX_PANELS:
                if e > budget and e > ROUNDOFF * va:
                    ok = False
                vals[s] += v
                errs[s] += e
            else:
                m = 0.5 * (a + b)
                stack_a[top] = m
                stack_b[top] = b
                stack_d[top] = d + 1
                top += 1
                stack_a[top] = a
                stack_b[top] = m
                stack_d[top] = d + 1
                top += 1
    return vals, errs, ok


# --------------------------------------------------------------------------
# numpy forms


def _horner_np(coefs, x):
    acc = np.zeros_like(x, dtype=float)
    for c in coefs[::-1]:
        acc = acc * x + c
    return acc


def _laurent_eval_numpy(coefs, min_exp, x):
    return _horner_np(coefs, x) * x**min_exp


def _phi_eval_numpy(tau, num_l, num_r, log_coeff, den, den_min):
    left = tau <= 1.0
    sg = 2.0 - tau
    n = np.where(left, _horner_np(num_l, tau), _horner_np(num_r, sg))
    if log_coeff != 0.0:
        n = n + log_coeff * np.where(left, np.log1p(tau), np.log1p(-sg / 3.0))
    u = 1.0 + tau
    return n / (_horner_np(den, u) * u**den_min)


_NODES = np.concatenate([-XGK[:7], XGK[7:][::-1], XGK[:7][::-1]])
_WK = np.concatenate([WGK[:7], WGK[7:], WGK[:7][::-1]])
_WG = np.zeros(15)
_WG[[1, 3, 5]] = WG[:3]
_WG[7] = WG[3]
_WG[[13, 11, 9]] = WG[:3]


def _integrate_segments_numpy(edges, power, num_l, num_r, log_coeff, den, den_min, tol):
    nseg = edges.shape[0] - 1
    vals = np.zeros(nseg)
    errs = np.zeros(nseg)
    total = abs(edges[-1] - edges[0])
    a = edges[:-1].astype(float)
    b = edges[1:].astype(float)
    seg = np.arange(nseg)
    depth = 0
    panels = 0
    ok = True
    while a.size:
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        t = c[:, None] + h[:, None] * _NODES[None, :]
        f = t**power / _phi_eval_numpy(t.ravel(), num_l, num_r, log_coeff, den, den_min).reshape(t.shape)
        rk = f @ _WK * h
        err = np.abs(rk - (f @ _WG) * h)
        floor = ROUNDOFF * (np.abs(f) @ _WK) * np.abs(h)
        budget = tol * np.abs(b - a) / total
        good = (err <= budget) | (err <= floor)
        panels += a.size
        stop = depth >= MAX_DEPTH or panels >= MAX_PANELS
        done = good | stop
        if stop and not np.all(good):
            ok = False
        np.add.at(vals, seg[done], rk[done])
        np.add.at(errs, seg[done], err[done])
        keep = ~done
        m = c[keep]
        a, b = np.concatenate([a[keep], m]), np.concatenate([m, b[keep]])
        seg = np.concatenate([seg[keep], seg[keep]])
        depth += 1
    return vals, errs, ok


# --------------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    _jit = numba.njit(cache=True)
    # inlined so the per-point calls do not block loop vectorisation
    _ipow = numba.njit(cache=True, inline="always")(_ipow)
    _phi_scalar = numba.njit(cache=True, inline="always")(_phi_scalar)
    _gk15 = _jit(_gk15)
    _laurent_eval_jit = _jit(_laurent_eval_loop)
    _phi_eval_jit = _jit(_phi_eval_loop)
    _integrate_segments_jit = _jit(_integrate_segments_loop)
    BACKEND = "numba"
else:
    BACKEND = "numpy"


def _arr(x) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(x, dtype=float))


def _stack(num_l, num_r) -> np.ndarray:
    n = max(num_l.shape[0], num_r.shape[0])
    out = np.zeros((2, n))
    out[0, :num_l.shape[0]] = num_l
    out[1, :num_r.shape[0]] = num_r
    return out


def laurent_eval(coefs, min_exp: int, x, backend: str | None = None) -> np.ndarray:
    """Values of ``sum coefs[j] x**(j + min_exp)`` on a float grid."""
    backend = backend or BACKEND
    coefs, x = _arr(coefs), _arr(x)
    if backend == "numba":
        return _laurent_eval_jit(coefs, int(min_exp), x)
    return _laurent_eval_numpy(coefs, int(min_exp), x)


def phi_eval(tau, num_l, num_r, log_coeff: float, den, den_min: int, backend: str | None = None) -> np.ndarray:
    """``N(tau) / (u^den_min sum den[j] u^j)`` with ``u = 1 + tau``.

    ``N = sum num_l[j] tau^j + log_coeff*ln(u)`` for ``tau <= 1`` and
    ``sum num_r[j] (2-tau)^j + log_coeff*ln(u/3)`` beyond.
    """
    backend = backend or BACKEND
    tau, num_l, num_r, den = _arr(tau), _arr(num_l), _arr(num_r), _arr(den)
    if backend == "numba":
        return _phi_eval_jit(tau, _stack(num_l, num_r), float(log_coeff), den, int(den_min))
    return _phi_eval_numpy(tau, num_l, num_r, float(log_coeff), den, int(den_min))


def integrate_segments(edges, power: int, num_l, num_r, log_coeff: float, den, den_min: int,
                       tol: float, backend: str | None = None):
    """Adaptive GK15 integrals of ``t**power / phi(t)`` over consecutive edges.

    Returns ``(values, error_estimates, converged)``.  A panel is accepted
    when its error estimate is below its share ``tol * width / total`` or at
    the roundoff floor of its own integral; ``converged`` is False when some
    panel met neither before the depth or panel limit.
    """
    backend = backend or BACKEND
    edges, num_l, num_r, den = _arr(edges), _arr(num_l), _arr(num_r), _arr(den)
    if backend == "numba":
        return _integrate_segments_jit(edges, int(power), _stack(num_l, num_r), float(log_coeff), den,
                                       int(den_min), float(tol))
    return _integrate_segments_numpy(edges, int(power), num_l, num_r, float(log_coeff), den, int(den_min), float(tol))


def available_backends() -> list[str]:
    return ["numba", "numpy"] if USE_NUMBA else ["numpy"]
