"""Minimal SVG line charts with no plotting dependency."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def grey_shades(k: int) -> list[str]:
    """Dark to light; the first series is drawn darkest."""
    if k == 1:
        return ["#202020"]
    out = []
    for i in range(k):
        v = int(0x20 + (0xc0 - 0x20) * i / (k - 1))
        out.append(f"#{v:02x}{v:02x}{v:02x}")
    return out


def line_chart(
    path: Path,
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
    colors: Sequence[str] | None = None,
    metadata: str | None = None,
    width: int = 800,
    height: int = 520,
) -> Path:
    """Write one ``<polyline>`` per series ``(label, xs, ys)``."""
    left, right, top, bottom = 80, 170, 50, 60
    pw, ph = width - left - right, height - top - bottom
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    colors = list(colors or grey_shades(len(series)))

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]
    if metadata is not None:
        out.append(f"<metadata>{_escape(metadata)}</metadata>")
    out.append('<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>')
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="28" text-anchor="middle" font-size="16" font-family="sans-serif">{_escape(title)}</text>'
    )
    # axes
    out.append(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="#000"/>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="#000"/>')
    for t in _nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" stroke="#000"/>')
        out.append(
            f'<text x="{X:.2f}" y="{top + ph + 20}" text-anchor="middle" font-size="11" font-family="sans-serif">{t:g}</text>'
        )
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="#000"/>')
        out.append(
            f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end" font-size="11" font-family="sans-serif">{t:g}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle" font-size="13" font-family="sans-serif">{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="20" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="13" font-family="sans-serif" '
        f'transform="rotate(-90 20 {top + ph / 2:.1f})">{_escape(y_label)}</text>'
    )
    for (label, xs, ys), color in zip(series, colors):
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
    # legend
    lx = left + pw + 20
    for i, ((label, _, _), color) in enumerate(zip(series, colors)):
        ly = top + 10 + 20 * i
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        out.append(
            f'<text x="{lx + 30}" y="{ly + 4}" font-size="12" font-family="sans-serif">{_escape(label)}</text>'
        )
    out.append("</svg>")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
    return path
