"""Dependency-free log-log SVG charts with byte-stable output."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

WIDTH, HEIGHT = 640, 420
MARGIN = 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _f(x: float) -> str:
    return f"{x:.2f}"


def loglog_svg(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str = "",
    xlabel: str = "m",
    ylabel: str = "error",
) -> str:
    """Render ``(label, xs, ys)`` series on log2 axes; non-positive points are dropped."""
    pts = [
        (label, [(math.log2(x), math.log2(y)) for x, y in zip(xs, ys) if x > 0 and y > 0])
        for label, xs, ys in series
    ]
    allx = [p[0] for _, s in pts for p in s] or [0.0, 1.0]
    ally = [p[1] for _, s in pts for p in s] or [0.0, 1.0]
    x0, x1 = math.floor(min(allx)), math.ceil(max(allx))
    y0, y1 = math.floor(min(ally)), math.ceil(max(ally))
    x1 = max(x1, x0 + 1)
    y1 = max(y1, y0 + 1)

    def sx(v):
        return MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def sy(v):
        return HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="15">{title}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    for k in range(x0, x1 + 1):
        out.append(
            f'<text x="{_f(sx(k))}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle" '
            f'font-size="11">2^{k}</text>'
        )
    for k in range(y0, y1 + 1):
        out.append(
            f'<text x="{MARGIN - 6}" y="{_f(sy(k) + 4)}" text-anchor="end" '
            f'font-size="11">2^{k}</text>'
        )
    out.append(
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="12">'
        f"{xlabel}</text>"
    )
    out.append(
        f'<text x="15" y="{HEIGHT // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {HEIGHT // 2})">{ylabel}</text>'
    )
    for i, (label, s) in enumerate(pts):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_f(sx(a))},{_f(sy(b))}" for a, b in s)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for a, b in s:
            out.append(f'<circle cx="{_f(sx(a))}" cy="{_f(sy(b))}" r="3" fill="{color}"/>')
        ly = MARGIN + 16 * i
        out.append(
            f'<text x="{WIDTH - MARGIN - 4}" y="{ly}" text-anchor="end" font-size="11" '
            f'fill="{color}">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_loglog_svg(path, series, **kwargs) -> Path:
    path = Path(path)
    path.write_text(loglog_svg(series, **kwargs), encoding="utf-8")
    return path
