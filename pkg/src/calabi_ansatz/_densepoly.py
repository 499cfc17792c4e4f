"""Dense univariate polynomial helpers over an exact field.

Polynomials are lists of coefficients, index = power.  Coefficients only need
``+ - * /`` and an exact ``== 0`` test, so the same routines serve ``Fraction``
coefficients and elements of the ln3 function field.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Sequence


def trim(p: Sequence[Any]) -> list:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(p: Sequence[Any]) -> int:
    return len(p) - 1


def add(p: Sequence[Any], q: Sequence[Any]) -> list:
    n = max(len(p), len(q))
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else 0
        b = q[i] if i < len(q) else 0
        out.append(a + b)
    return trim(out)


def sub(p: Sequence[Any], q: Sequence[Any]) -> list:
    return add(p, [-c for c in q])


def mul(p: Sequence[Any], q: Sequence[Any]) -> list:
    if not p or not q:
        return []
    out: list = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def scale(p: Sequence[Any], c: Any) -> list:
    return trim([c * a for a in p])


def derivative(p: Sequence[Any]) -> list:
    return trim([i * p[i] for i in range(1, len(p))])


def divmod_(p: Sequence[Any], q: Sequence[Any]) -> tuple[list, list]:
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = trim(p)
    if len(r) < len(q):
        return [], r
    lead = q[-1]
    quot: list = [0] * (len(r) - len(q) + 1)
    while len(r) >= len(q) and r:
        shift = len(r) - len(q)
        c = r[-1] / lead
        quot[shift] = c
        for i, b in enumerate(q):
            r[i + shift] = r[i + shift] - c * b
        r.pop()
        r = trim(r)
    return trim(quot), r


def monic(p: Sequence[Any]) -> list:
    p = trim(p)
    if not p:
        return []
    lead = p[-1]
    return [c / lead for c in p]


def gcd(p: Sequence[Any], q: Sequence[Any]) -> list:
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return monic(a)


def horner(p: Sequence[Any], x: Any) -> Any:
    acc: Any = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def to_fractions(p: Sequence[Any]) -> list[Fraction]:
    return trim([Fraction(c) for c in p])


def map_coeffs(p: Sequence[Any], f: Callable[[Any], Any]) -> list:
    return trim([f(c) for c in p])
