"""Minimal deterministic SVG line plots (no plotting library needed)."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 64, 16, 32, 48
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo, hi, n=5):
    if hi == lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def line_plot(series, title="", xlabel="", ylabel="") -> str:
    """Render ``series`` as an SVG document.

    ``series`` is a list of dicts with keys ``x``, ``y``, ``label`` and an
    optional ``dashed`` flag.
    """
    xs = np.concatenate([np.asarray(s["x"], float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(x):
        return _ML + (x - x0) / (x1 - x0) * pw

    def py(y):
        return _MT + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<text x="{px(t):.2f}" y="{_H - _MB + 16}" font-size="11" '
                   f'text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{_ML - 6}" y="{py(t) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{_W / 2:.1f}" y="18" font-size="14" text-anchor="middle">{escape(title)}</text>')
    out.append(f'<text x="{_W / 2:.1f}" y="{_H - 8}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{_H / 2:.1f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {_H / 2:.1f})">{escape(ylabel)}</text>')
    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}"
                       for a, b in zip(np.asarray(s["x"], float), np.asarray(s["y"], float)))
        dash = ' stroke-dasharray="6 4"' if s.get("dashed") else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        ly = _MT + 14 + 16 * i
        out.append(f'<line x1="{_ML + pw - 120}" y1="{ly - 4}" x2="{_ML + pw - 96}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{_ML + pw - 90}" y="{ly}" font-size="11">{escape(s["label"])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
