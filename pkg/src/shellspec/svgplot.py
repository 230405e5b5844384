"""Minimal deterministic SVG line plots.

All coordinates are emitted with fixed decimal formatting, so identical
inputs produce byte-identical files; no timestamps, no randomness.
"""

from __future__ import annotations

import numpy as np

_PALETTE = ("#1f6fb2", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b",
            "#008b8b", "#cd5c5c", "#556b2f")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def plot_svg(curves, title: str = "", xlabel: str = "", ylabel: str = "",
             width: int = 720, height: int = 540, path: str | None = None,
             equal_axes: bool = False) -> str:
    """Render labelled polylines: curves = [(label, points (n,2)), ...].

    Labels starting with "_" are drawn but left out of the legend.
    """
    if not curves:
        raise ValueError("need at least one curve")
    pts_all = np.vstack([np.asarray(p, dtype=float) for _, p in curves])
    x_lo, y_lo = pts_all.min(axis=0)
    x_hi, y_hi = pts_all.max(axis=0)
    if equal_axes:
        span = max(x_hi - x_lo, y_hi - y_lo, 1e-12)
        xc, yc = 0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi)
        x_lo, x_hi = xc - 0.55 * span, xc + 0.55 * span
        y_lo, y_hi = yc - 0.55 * span, yc + 0.55 * span
    else:
        pad_x = 0.05 * max(x_hi - x_lo, 1e-12)
        pad_y = 0.05 * max(y_hi - y_lo, 1e-12)
        x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
        y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    left, right, top, bottom = 70, 20, 40, 50
    pw = width - left - right
    ph = height - top - bottom

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + (y_hi - y) / (y_hi - y_lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" '
           'fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" '
           'fill="none" stroke="black" stroke-width="1"/>']
    if title:
        out.append(f'<text x="{width // 2}" y="24" text-anchor="middle" '
                   f'font-size="16" font-family="sans-serif">{title}</text>')
    for xt in _ticks(x_lo, x_hi):
        px = _fmt(sx(xt))
        out.append(f'<line x1="{px}" y1="{top + ph}" x2="{px}" '
                   f'y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px}" y="{top + ph + 20}" text-anchor="middle" '
                   f'font-size="11" font-family="sans-serif">{xt:.4g}</text>')
    for yt in _ticks(y_lo, y_hi):
        py = _fmt(sy(yt))
        out.append(f'<line x1="{left - 5}" y1="{py}" x2="{left}" '
                   f'y2="{py}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py}" text-anchor="end" '
                   f'font-size="11" font-family="sans-serif">{yt:.4g}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw // 2}" y="{height - 10}" '
                   'text-anchor="middle" font-size="13" '
                   f'font-family="sans-serif">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="18" y="{top + ph // 2}" text-anchor="middle" '
                   f'font-size="13" font-family="sans-serif" '
                   f'transform="rotate(-90 18 {top + ph // 2})">{ylabel}'
                   '</text>')

    legend = []
    for i, (label, pts) in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        pts = np.asarray(pts, dtype=float)
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        if not label.startswith("_"):
            legend.append((label, color))
    for j, (label, color) in enumerate(legend):
        ly = top + 14 + 16 * j
        out.append(f'<line x1="{left + pw - 150}" y1="{ly}" '
                   f'x2="{left + pw - 120}" y2="{ly}" stroke="{color}" '
                   'stroke-width="1.5"/>')
        out.append(f'<text x="{left + pw - 114}" y="{ly + 4}" '
                   f'font-size="11" font-family="sans-serif">{label}</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def fronts_svg(record, path: str | None = None, max_fronts: int = 12) -> str:
    """Two closed polylines per drawn time (inner and outer front)."""
    n = len(record.times)
    if n == 0:
        raise ValueError("empty sweep record")
    idx = sorted(set(np.linspace(0, n - 1, min(max_fronts, n)).astype(int)))
    curves = []
    for which, fronts in (("inner", record.fronts_in),
                          ("outer", record.fronts_out)):
        for rank, i in enumerate(idx):
            pts = fronts[i].points
            closed = np.vstack([pts, pts[:1]])
            label = f"{which} t={record.times[i]:.3f}" if rank in (0, len(idx) - 1) \
                else f"_{which}_{i}"
            curves.append((label, closed))
    return plot_svg(curves, title="front sweep", xlabel="x", ylabel="y",
                    path=path, equal_axes=True)
