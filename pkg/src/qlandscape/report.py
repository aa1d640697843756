"""File emitters: CSV with a metadata sidecar, JSON, and plain SVG charts.

The SVG writers are deterministic: numbers are printed with fixed precision
and nothing depends on time or locale, so identical inputs give identical
bytes.
"""
from __future__ import annotations

import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "COLORMAP",
    "colormap",
    "heatmap_svg",
    "line_chart_svg",
    "write_csv",
    "write_json",
    "write_text",
]

# Fixed 9-stop colormap (dark blue -> teal -> yellow), linearly interpolated.
COLORMAP = (
    (0.000, (0x1b, 0x0c, 0x41)),
    (0.125, (0x2c, 0x1f, 0x74)),
    (0.250, (0x2d, 0x48, 0x8c)),
    (0.375, (0x21, 0x6d, 0x8e)),
    (0.500, (0x1c, 0x90, 0x8c)),
    (0.625, (0x2e, 0xb2, 0x7c)),
    (0.750, (0x75, 0xce, 0x55)),
    (0.875, (0xc2, 0xdf, 0x23)),
    (1.000, (0xfd, 0xe7, 0x25)),
)

SERIES_COLORS = ("#1f4e9c", "#c8432b", "#2b8c4f", "#7b3fa0", "#b8860b")


def colormap(x: float) -> str:
    """Hex color for ``x`` in [0, 1] (clamped)."""
    x = min(1.0, max(0.0, float(x)))
    for (a, ca), (b, cb) in zip(COLORMAP, COLORMAP[1:]):
        if x <= b:
            f = 0.0 if b == a else (x - a) / (b - a)
            rgb = [round(u + f * (v - u)) for u, v in zip(ca, cb)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*COLORMAP[-1][1])


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ensure_parent(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InvalidInputError(f"cannot create directory {path.parent}: {exc.strerror}") from None


def write_text(path, text: str) -> Path:
    path = Path(path)
    _ensure_parent(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def write_json(path, obj) -> Path:
    return write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path, csv_text: str, metadata: dict) -> Path:
    """Write ``csv_text`` and ``<path>.meta.json`` holding ``metadata``."""
    p = write_text(path, csv_text)
    write_json(Path(str(p) + ".meta.json"), metadata)
    return p


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def line_chart_svg(series, xlabel: str, ylabel: str, title: str, width: int = 640, height: int = 400,
                   y_range: tuple | None = None) -> str:
    """Line chart of ``series``: a list of ``(name, x, y)`` triples."""
    if not series:
        raise InvalidInputError("line chart needs at least one series")
    left, right, top, bottom = 70, 20, 40, 60
    pw, ph = width - left - right, height - top - bottom
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = y_range if y_range is not None else (float(ys.min()), float(ys.max()))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
           f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{_fmt(sx(t))}" y1="{top + ph}" x2="{_fmt(sx(t))}" y2="{top + ph + 5}" stroke="#000000"/>')
        out.append(f'<text x="{_fmt(sx(t))}" y="{top + ph + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{_fmt(sy(t))}" x2="{left}" y2="{_fmt(sy(t))}" stroke="#000000"/>')
        out.append(f'<text x="{left - 8}" y="{_fmt(sy(t) + 4)}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    for k, (name, x, y) in enumerate(series):
        color = SERIES_COLORS[k % len(SERIES_COLORS)]
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(np.asarray(x, float), np.asarray(y, float)))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 16 + 16 * k
        out.append(f'<line x1="{left + pw - 150}" y1="{ly - 4}" x2="{left + pw - 130}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 125}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _pool_max(values: np.ndarray, cells: int) -> np.ndarray:
    """Block maximum down to at most ``cells`` per side so peaks stay visible."""
    v = np.asarray(values, float)
    out = v
    for axis in (0, 1):
        n = out.shape[axis]
        if n <= cells:
            continue
        edges = np.linspace(0, n, cells + 1).round().astype(int)
        out = np.maximum.reduceat(out, edges[:-1], axis=axis)
    return out


def heatmap_svg(values, x_range: tuple, y_range: tuple, xlabel: str, ylabel: str, title: str,
                cells: int = 96, value_range: tuple = (0.0, 1.0), size: int = 420) -> str:
    """Heatmap of ``values[i, k]`` with ``i`` along x and ``k`` along y (upwards).

    Large grids are block-max pooled to ``cells`` per side.  Colors come from
    :data:`COLORMAP` over ``value_range``.
    """
    v = np.asarray(values, float)
    if v.ndim != 2 or v.size == 0:
        raise InvalidInputError("heatmap needs a non-empty 2-D array")
    v = _pool_max(v, cells)
    nx, ny = v.shape
    left, top, bar = 70, 40, 60
    width, height = left + size + bar + 30, top + size + 60
    cw, ch = size / nx, size / ny
    lo, hi = value_range
    span = hi - lo if hi != lo else 1.0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
           f'<text x="{(left + size / 2):.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           '<g shape-rendering="crispEdges">']
    for i in range(nx):
        for k in range(ny):
            color = colormap((v[i, k] - lo) / span)
            out.append(f'<rect x="{_fmt(left + i * cw)}" y="{_fmt(top + size - (k + 1) * ch)}" '
                       f'width="{_fmt(cw + 0.01)}" height="{_fmt(ch + 0.01)}" fill="{color}"/>')
    out.append("</g>")
    out.append(f'<rect x="{left}" y="{top}" width="{size}" height="{size}" fill="none" stroke="#000000"/>')
    for t in _ticks(*x_range):
        x = left + (t - x_range[0]) / (x_range[1] - x_range[0]) * size
        out.append(f'<text x="{_fmt(x)}" y="{top + size + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(*y_range):
        y = top + size - (t - y_range[0]) / (y_range[1] - y_range[0]) * size
        out.append(f'<text x="{left - 8}" y="{_fmt(y + 4)}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{left + size / 2:.1f}" y="{top + size + 40}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{top + size / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + size / 2:.1f})">{escape(ylabel)}</text>')
    bx = left + size + 20
    steps = 64
    for s in range(steps):
        y = top + size - (s + 1) * size / steps
        out.append(f'<rect x="{bx}" y="{_fmt(y)}" width="16" height="{_fmt(size / steps + 0.01)}" '
                   f'fill="{colormap(s / (steps - 1))}"/>')
    for t in _ticks(lo, hi, 3):
        y = top + size - (t - lo) / span * size
        out.append(f'<text x="{bx + 20}" y="{_fmt(y + 4)}">{t:.3g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

