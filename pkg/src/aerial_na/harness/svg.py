"""Static SVG line charts of sweep and comparison CSVs."""

from __future__ import annotations

import csv
import io
import math

from ..errors import ConfigError

KINDS = {"sweep": ("source", "U", "na_value"), "compare": ("policy", "U", "na_value")}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 30, 50


def read_series(text: str, kind: str) -> dict[str, list[tuple[float, float]]]:
    if kind not in KINDS:
        raise ConfigError(f"plot kind must be one of {tuple(KINDS)}", key="kind")
    key, xcol, ycol = KINDS[kind]
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in (key, xcol, ycol) if c not in header]
    if missing:
        raise ConfigError(f"CSV lacks column(s) {', '.join(missing)} for a {kind} plot", line=1)
    series: dict[str, list[tuple[float, float]]] = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            x, y = float(row[xcol]), float(row[ycol])
        except (TypeError, ValueError):
            raise ConfigError(f"non-numeric {xcol}/{ycol}", line=lineno) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ConfigError(f"non-finite {xcol}/{ycol}", line=lineno)
        series.setdefault(row[key], []).append((x, y))
    if not series:
        raise ConfigError("CSV has no data rows to plot")
    return series


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def render(series: dict[str, list[tuple[float, float]]], xlabel="U",
           ylabel="NA lower bound") -> str:
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5 * max(abs(y0), 1e-3), y1 + 0.5 * max(abs(y1), 1e-3)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
           f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{TOP + ph}" x2="{px(t):.2f}" y2="{TOP + ph + 4}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{TOP + ph + 16}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{LEFT - 4}" y1="{py(t):.2f}" x2="{LEFT}" y2="{py(t):.2f}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{LEFT - 6}" y="{py(t) + 4:.2f}" text-anchor="end">{t:.6g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">'
               f'{xlabel}</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{ylabel}</text>')
    for i, (name, pts) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in sorted(pts))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{coords}"/>')
        ly = TOP + 14 + 18 * i
        lx = LEFT + pw + 14
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{_escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg(csv_text: str, kind: str) -> str:
    return render(read_series(csv_text, kind))
