"""Dependency-free SVG line charts and matching gnuplot scripts."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
DASHES = ("", "6,3", "2,3", "8,3,2,3")

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 180, 40, 55


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        if v >= lo - 1e-9 * step:
            ticks.append(round(v, 12))
        v += step
    return ticks


def line_chart(series, title="", xlabel="", ylabel="", note="") -> str:
    """Render ``series`` = [(label, xs, ys), ...] as an SVG document.

    Series sharing a label prefix before ``" / "`` share a color; the part
    after picks the dash pattern. ``note`` is embedded as an XML comment.
    """
    xs_all = [x for _, xs, ys in series for x, y in zip(xs, ys) if _finite(y)]
    ys_all = [y for _, _, ys in series for y in ys if _finite(y)]
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pad = 0.05 * (y1 - y0 or abs(y1) or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    if note:
        out.append(f"<!-- {escape(note)} -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
               f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">')
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _nice_ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.1f}" y1="{TOP + ph}" x2="{sx(t):.1f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.1f}" y="{TOP + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y0, y1):
        out.append(f'<line x1="{LEFT - 5}" y1="{sy(t):.1f}" x2="{LEFT}" y2="{sy(t):.1f}" stroke="black"/>')
        out.append(f'<line x1="{LEFT}" y1="{sy(t):.1f}" x2="{LEFT + pw}" y2="{sy(t):.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{sy(t) + 4:.1f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(16,{TOP + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')

    groups, styles = [], []
    for label, _, _ in series:
        g, _, s = label.partition(" / ")
        if g not in groups:
            groups.append(g)
        if s not in styles:
            styles.append(s)
    for k, (label, xs, ys) in enumerate(series):
        g, _, s = label.partition(" / ")
        color = PALETTE[groups.index(g) % len(PALETTE)]
        dash = DASHES[styles.index(s) % len(DASHES)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if _finite(y))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{pts}"/>')
        ly = TOP + 14 + 16 * k
        lx = LEFT + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" '
                   f'stroke-width="1.5"{dash_attr}/>')
        out.append(f'<text x="{lx + 27}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _finite(y):
    return y is not None and math.isfinite(y)


def gnuplot_script(csv_name, svg_name, title, xlabel, ylabel, plots, note="") -> str:
    """gnuplot commands redrawing a chart from the CSV; ``plots`` are raw plot clauses."""
    lines = []
    if note:
        lines.append(f"# {note}")
    lines += [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key outside right",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set terminal svg size 640,420",
        f"set output '{svg_name}'",
        "plot " + ", \\\n     ".join(p.format(csv=csv_name) for p in plots),
    ]
    return "\n".join(lines) + "\n"
