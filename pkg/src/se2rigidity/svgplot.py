"""Minimal SVG line and trajectory plots (no plotting dependency)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 420
ML, MR, MT, MB = 70, 20, 40, 50
PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def _nice_ticks(lo, hi, count=5):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


class _Axes:
    def __init__(self, xlim, ylim, equal=False):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x0, self.x1 = self.x0 - 0.5, self.x0 + 0.5
        if self.y1 <= self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y0 + 0.5
        if equal:
            # same data-per-pixel in x and y
            pw, ph = W - ML - MR, H - MT - MB
            sx = (self.x1 - self.x0) / pw
            sy = (self.y1 - self.y0) / ph
            s = max(sx, sy)
            cx, cy = (self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2
            self.x0, self.x1 = cx - s * pw / 2, cx + s * pw / 2
            self.y0, self.y1 = cy - s * ph / 2, cy + s * ph / 2

    def px(self, x):
        return ML + (np.asarray(x) - self.x0) / (self.x1 - self.x0) * (W - ML - MR)

    def py(self, y):
        return H - MB - (np.asarray(y) - self.y0) / (self.y1 - self.y0) * (H - MT - MB)


def _frame(ax: _Axes, title, xlabel, ylabel, ylabels=None):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" '
        f'fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(ax.x0, ax.x1):
        x = float(ax.px(t))
        parts.append(f'<line x1="{x:.2f}" y1="{H - MB}" x2="{x:.2f}" y2="{H - MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{H - MB + 17}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(ax.y0, ax.y1):
        y = float(ax.py(t))
        label = ylabels(t) if ylabels else f"{t:g}"
        parts.append(f'<line x1="{ML - 5}" y1="{y:.2f}" x2="{ML}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{ML - 8}" y="{y + 4:.2f}" text-anchor="end">{label}</text>')
    parts.append(f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(
        f'<text x="16" y="{H / 2}" text-anchor="middle" transform="rotate(-90 16 {H / 2})">'
        f"{escape(ylabel)}</text>"
    )
    return parts


def _polyline(xs, ys, color, width=1.2, dash=None):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y))
    d = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"{d}/>'


def _decimate(t, y, max_points=2000):
    step = max(1, len(t) // max_points)
    idx = np.arange(0, len(t), step)
    if idx[-1] != len(t) - 1:
        idx = np.append(idx, len(t) - 1)
    return np.asarray(t)[idx], np.asarray(y)[idx]


def line_plot(t, series, title="", xlabel="", ylabel="", logy=False, floor=1e-16) -> str:
    """One polyline per series against a shared time axis."""
    t = np.asarray(t, dtype=float)
    ys = [np.asarray(s, dtype=float) for s in series]
    if logy:
        ys = [np.log10(np.maximum(np.abs(y), floor)) for y in ys]
    finite = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.zeros(1)
    if finite.size == 0:
        finite = np.zeros(1)
    lo, hi = float(finite.min()), float(finite.max())
    pad = 0.05 * (hi - lo) if hi > lo else 0.5
    ax = _Axes((float(t[0]), float(t[-1])) if len(t) else (0.0, 1.0), (lo - pad, hi + pad))
    parts = _frame(ax, title, xlabel, ylabel, ylabels=(lambda v: f"1e{v:g}") if logy else None)
    for k, y in enumerate(ys):
        tt, yy = _decimate(t, y)
        parts.append(_polyline(ax.px(tt), ax.py(yy), PALETTE[k % len(PALETTE)]))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _arrow(ax, p, heading, length, color, dash=None, width=1.5):
    q = p + length * np.array([math.cos(heading), math.sin(heading)])
    x0, y0, x1, y1 = float(ax.px(p[0])), float(ax.py(p[1])), float(ax.px(q[0])), float(ax.py(q[1]))
    d = f' stroke-dasharray="{dash}"' if dash else ""
    # arrow head
    ang = math.atan2(y1 - y0, x1 - x0)
    hx1 = x1 - 7 * math.cos(ang - 0.4)
    hy1 = y1 - 7 * math.sin(ang - 0.4)
    hx2 = x1 - 7 * math.cos(ang + 0.4)
    hy2 = y1 - 7 * math.sin(ang + 0.4)
    return (
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" stroke="{color}" '
        f'stroke-width="{width}"{d}/>'
        f'<polyline points="{hx1:.2f},{hy1:.2f} {x1:.2f},{y1:.2f} {hx2:.2f},{hy2:.2f}" '
        f'fill="none" stroke="{color}" stroke-width="{width}"/>'
    )


def trajectory_plot(
    paths, truth, truth_heading, start, start_heading, end, end_heading, title=""
) -> str:
    """Planar estimate trajectories; squares and thick green arrows mark the truth,
    circles and dashed arrows the initial estimates."""
    allpts = np.vstack([np.vstack(paths), truth, start, end])
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    arrow = 0.12 * span
    pad = 0.15 * span
    ax = _Axes((lo[0] - pad, hi[0] + pad), (lo[1] - pad, hi[1] + pad), equal=True)
    parts = _frame(ax, title, "x (reference frame, unscaled)", "y (reference frame, unscaled)")
    for i, path in enumerate(paths):
        color = PALETTE[i % len(PALETTE)]
        xs, ys = _decimate(path[:, 0], path[:, 1])
        parts.append(_polyline(ax.px(xs), ax.py(ys), color))
        parts.append(_arrow(ax, truth[i], truth_heading[i], arrow, "#2ca02c", width=3))
        sx, sy = float(ax.px(truth[i][0])), float(ax.py(truth[i][1]))
        parts.append(
            f'<rect x="{sx - 5:.2f}" y="{sy - 5:.2f}" width="10" height="10" fill="none" '
            f'stroke="black" stroke-width="1.5"/>'
        )
        parts.append(_arrow(ax, start[i], start_heading[i], arrow, "black", dash="4,3", width=1))
        cx, cy = float(ax.px(start[i][0])), float(ax.py(start[i][1]))
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3.5" fill="none" stroke="black"/>')
        parts.append(_arrow(ax, end[i], end_heading[i], 0.7 * arrow, color, width=1.5))
        parts.append(
            f'<text x="{sx + 8:.2f}" y="{sy - 8:.2f}" fill="{color}">{i + 1}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
