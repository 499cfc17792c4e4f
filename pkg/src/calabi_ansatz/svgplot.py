"""Static SVG line charts with byte-stable output."""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 70, 80, 50, 60
PALETTE = ("#1f4e79", "#b5462b", "#3d7a3d", "#7a4d9a")


@dataclass(frozen=True)
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    right_axis: bool = False


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _range(series: list[Series]) -> tuple[float, float]:
    if not series:
        return 0.0, 1.0
    lo = min(float(np.min(s.y)) for s in series)
    hi = max(float(np.max(s.y)) for s in series)
    lo = min(lo, 0.0)
    if hi - lo < 1e-12:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    return lo - (pad if lo < 0 else 0.0), hi + pad


def line_chart(series: list[Series], title: str, xlabel: str, ylabel: str,
               y2label: str | None = None, xrange: tuple[float, float] = (0.0, 2.0)) -> str:
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    x0, x1 = xrange
    left = [s for s in series if not s.right_axis]
    right = [s for s in series if s.right_axis]
    ylo, yhi = _range(left)
    rlo, rhi = _range(right)

    def px(x: float) -> float:
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y: float, lo: float, hi: float) -> float:
        return TOP + (1 - (y - lo) / (hi - lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH // 2}" y="28" text-anchor="middle" font-family="sans-serif" font-size="16">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444444"/>',
    ]
    for t in _ticks(x0, x1):
        x = _fmt(px(t))
        out.append(f'<line x1="{x}" y1="{TOP + ph}" x2="{x}" y2="{TOP + ph + 5}" stroke="#444444"/>')
        out.append(f'<text x="{x}" y="{TOP + ph + 20}" text-anchor="middle" font-family="sans-serif" font-size="12">{t:.2f}</text>')
    for t in _ticks(ylo, yhi):
        y = _fmt(py(t, ylo, yhi))
        out.append(f'<line x1="{LEFT - 5}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="#444444"/>')
        out.append(f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + pw}" y2="{y}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y}" text-anchor="end" dominant-baseline="middle" font-family="sans-serif" font-size="12">{t:.3g}</text>')
    if right:
        for t in _ticks(rlo, rhi):
            y = _fmt(py(t, rlo, rhi))
            out.append(f'<line x1="{LEFT + pw}" y1="{y}" x2="{LEFT + pw + 5}" y2="{y}" stroke="#444444"/>')
            out.append(f'<text x="{LEFT + pw + 8}" y="{y}" dominant-baseline="middle" font-family="sans-serif" font-size="12">{t:.3g}</text>')
    if ylo < 0 < yhi:
        y = _fmt(py(0.0, ylo, yhi))
        out.append(f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + pw}" y2="{y}" stroke="#999999" stroke-dasharray="4 3"/>')
    out.append(f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2:.0f}" text-anchor="middle" font-family="sans-serif" font-size="14" '
               f'transform="rotate(-90 18 {TOP + ph / 2:.0f})">{escape(ylabel)}</text>')
    if right and y2label:
        xr = WIDTH - 18
        out.append(f'<text x="{xr}" y="{TOP + ph / 2:.0f}" text-anchor="middle" font-family="sans-serif" font-size="14" '
                   f'transform="rotate(90 {xr} {TOP + ph / 2:.0f})">{escape(y2label)}</text>')

    for i, s in enumerate(series):
        lo, hi = (rlo, rhi) if s.right_axis else (ylo, yhi)
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(float(x)))},{_fmt(py(float(y), lo, hi))}" for x, y in zip(s.x, s.y))
        dash = ' stroke-dasharray="6 4"' if s.right_axis else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{pts}"/>')
        ly = TOP + 18 + 18 * i
        out.append(f'<line x1="{LEFT + 12}" y1="{ly}" x2="{LEFT + 36}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{LEFT + 42}" y="{ly}" dominant-baseline="middle" font-family="sans-serif" font-size="12">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
