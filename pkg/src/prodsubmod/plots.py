"""Minimal standalone SVG charts: gap curves on a log axis and signal panels.

Output depends only on the input numbers (fixed formatting, no timestamps), so
identical inputs give identical bytes.
"""
from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
GAP_FLOOR = 1e-16

W, H = 640, 400
MARGIN = dict(left=70, right=150, top=30, bottom=50)


def _f(v: float) -> str:
    return f"{v:.2f}"


def _header(width, height) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]


class _Frame:
    """Maps data coordinates into one rectangular panel."""

    def __init__(self, x0, y0, w, h, xlim, ylim):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        a, b = self.xlim
        return self.x0 + (x - a) / (b - a) * self.w if b > a else self.x0 + self.w / 2

    def py(self, y):
        a, b = self.ylim
        return self.y0 + self.h - (y - a) / (b - a) * self.h if b > a else self.y0 + self.h / 2

    def axes(self, xlabel, ylabel, yticks, xticks) -> list:
        out = [f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(self.w)}" '
               f'height="{_f(self.h)}" fill="none" stroke="black"/>']
        for val, label in yticks:
            y = self.py(val)
            out.append(f'<line x1="{_f(self.x0 - 4)}" y1="{_f(y)}" x2="{_f(self.x0)}" '
                       f'y2="{_f(y)}" stroke="black"/>')
            out.append(f'<text x="{_f(self.x0 - 6)}" y="{_f(y + 4)}" text-anchor="end">'
                       f'{escape(label)}</text>')
        for val, label in xticks:
            x = self.px(val)
            yb = self.y0 + self.h
            out.append(f'<line x1="{_f(x)}" y1="{_f(yb)}" x2="{_f(x)}" y2="{_f(yb + 4)}" '
                       f'stroke="black"/>')
            out.append(f'<text x="{_f(x)}" y="{_f(yb + 16)}" text-anchor="middle">'
                       f'{escape(label)}</text>')
        out.append(f'<text x="{_f(self.x0 + self.w / 2)}" y="{_f(self.y0 + self.h + 36)}" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="{_f(self.x0 - 50)}" y="{_f(self.y0 + self.h / 2)}" '
                   f'text-anchor="middle" transform="rotate(-90 {_f(self.x0 - 50)} '
                   f'{_f(self.y0 + self.h / 2)})">{escape(ylabel)}</text>')
        return out

    def series(self, xs, ys, color, markers=False, dashed=False) -> list:
        pts = [(self.px(x), self.py(y)) for x, y in zip(xs, ys)]
        out = []
        if len(pts) > 1 and not markers:
            path = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
            dash = ' stroke-dasharray="5,3"' if dashed else ""
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"{dash}/>')
        if markers or len(pts) == 1:
            out.extend(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2.5" fill="{color}"/>'
                       for x, y in pts)
        return out


def _linear_ticks(lo, hi, count=5):
    if hi <= lo:
        return [(lo, f"{lo:g}")]
    return [(v, f"{v:.3g}") for v in np.linspace(lo, hi, count)]


def _legend(x, y, names) -> list:
    out = []
    for s, name in enumerate(names):
        color = PALETTE[s % len(PALETTE)]
        yy = y + 18 * s
        out.append(f'<line x1="{_f(x)}" y1="{_f(yy)}" x2="{_f(x + 20)}" y2="{_f(yy)}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{_f(x + 26)}" y="{_f(yy + 4)}">{escape(name)}</text>')
    return out


def gap_svg(curves: Mapping[str, Sequence[float]], title: str = "certified duality gap") -> str:
    """Gap curves against iteration on a log10 axis; gaps below 1e-16 are drawn at 1e-16."""
    if not curves or any(len(v) == 0 for v in curves.values()):
        raise ValueError("every gap series must be nonempty")
    logs = {k: np.log10(np.maximum(np.asarray(v, dtype=float), GAP_FLOOR)) for k, v in curves.items()}
    lo = math.floor(min(float(v.min()) for v in logs.values()))
    hi = math.ceil(max(float(v.max()) for v in logs.values()))
    if hi == lo:
        hi = lo + 1
    n_max = max(len(v) for v in logs.values())
    fr = _Frame(MARGIN["left"], MARGIN["top"], W - MARGIN["left"] - MARGIN["right"],
                H - MARGIN["top"] - MARGIN["bottom"], (1, max(n_max, 2)), (lo, hi))
    step = max(1, (hi - lo) // 8)
    yticks = [(e, f"1e{e}") for e in range(lo, hi + 1, step)]
    xticks = [(int(round(v)), str(int(round(v)))) for v in np.linspace(1, max(n_max, 2), 5)]
    out = _header(W, H)
    out.append(f'<text x="{_f(W / 2 - MARGIN["right"] / 2)}" y="18" text-anchor="middle">'
               f'{escape(title)}</text>')
    out.extend(fr.axes("iteration", "gap (log scale)", yticks, xticks))
    for s, (name, ys) in enumerate(logs.items()):
        out.extend(fr.series(np.arange(1, len(ys) + 1), ys, PALETTE[s % len(PALETTE)]))
    out.extend(_legend(W - MARGIN["right"] + 15, MARGIN["top"] + 10, list(logs)))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def signal_svg(noisy: Sequence[float], denoised: Mapping[str, Sequence[float]],
               clean: Sequence[float] = None) -> str:
    """Two stacked panels: the observed signal on top, the solvers' outputs below."""
    noisy = np.asarray(noisy, dtype=float)
    if noisy.size == 0:
        raise ValueError("signal must be nonempty")
    allv = [noisy] + [np.asarray(v, dtype=float) for v in denoised.values()]
    if clean is not None:
        allv.append(np.asarray(clean, dtype=float))
    lo = float(min(v.min() for v in allv))
    hi = float(max(v.max() for v in allv))
    pad = 0.05 * (hi - lo) if hi > lo else 0.5
    ylim = (lo - pad, hi + pad)
    height = 2 * H - 60
    idx = np.arange(noisy.size)
    xlim = (0, max(noisy.size - 1, 1))
    xticks = [(int(round(v)), str(int(round(v)))) for v in np.linspace(0, xlim[1], 5)]
    pw = W - MARGIN["left"] - MARGIN["right"]
    ph = (height - 2 * MARGIN["top"] - 2 * MARGIN["bottom"]) / 2
    top = _Frame(MARGIN["left"], MARGIN["top"], pw, ph, xlim, ylim)
    bot = _Frame(MARGIN["left"], 2 * MARGIN["top"] + MARGIN["bottom"] + ph, pw, ph, xlim, ylim)
    out = _header(W, height)
    out.append(f'<text x="{_f(MARGIN["left"] + pw / 2)}" y="18" text-anchor="middle">noisy signal</text>')
    out.extend(top.axes("position", "value", _linear_ticks(*ylim), xticks))
    names = ["observed"]
    out.extend(top.series(idx, noisy, PALETTE[0], markers=True))
    if clean is not None:
        out.extend(top.series(idx, clean, "#555555", dashed=True))
    out.append(f'<text x="{_f(MARGIN["left"] + pw / 2)}" y="{_f(bot.y0 - 12)}" '
               f'text-anchor="middle">denoised</text>')
    out.extend(bot.axes("position", "value", _linear_ticks(*ylim), xticks))
    for s, (name, v) in enumerate(denoised.items()):
        out.extend(bot.series(idx, np.asarray(v, dtype=float), PALETTE[(s + 1) % len(PALETTE)]))
        names.append(name)
    out.extend(_legend(W - MARGIN["right"] + 15, MARGIN["top"] + 10, names))
    out.append("</svg>")
    return "\n".join(out) + "\n"
