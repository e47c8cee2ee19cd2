"""Deterministic CSV serialization and a small SVG line-plot renderer.

The SVG is a pure function of the CSV text: plot options travel in the
``# plot:`` header line, so re-rendering a saved CSV gives the same figure.
"""

from __future__ import annotations

import csv
import io
import math
from html import escape

import numpy as np

SIG_DIGITS = 12
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")


def format_value(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0"  # drops the sign of -0.0 so output does not depend on it
    return format(v, f".{SIG_DIGITS}g")


def write_csv(header: list[str], columns: list[str], rows) -> str:
    """``#``-prefixed header lines followed by an RFC-4180 table."""
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in np.asarray(rows, dtype=float):
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def read_csv(text: str):
    """Returns (header lines without '# ', column names, float array)."""
    header, body = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            header.append(line[1:].strip())
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    data = np.array([[float(v) for v in row] for row in reader], dtype=float)
    return header, columns, data.reshape(-1, len(columns))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_W, _H = 720, 440
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 200, 40, 60


def _plot_options(header):
    opts = {"x": "linear", "y": "linear", "title": ""}
    for line in header:
        if line.startswith("plot:"):
            for item in line[len("plot:"):].split(","):
                if "=" in item:
                    k, v = (s.strip() for s in item.split("=", 1))
                    opts[k] = v
    return opts


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    k = 0
    while start + k * step <= hi + 1e-9 * step:
        ticks.append(start + k * step)
        k += 1
    return ticks


def render_svg(csv_text: str) -> str:
    header, columns, data = read_csv(csv_text)
    opts = _plot_options(header)
    log_x = opts["x"] == "log"
    x = data[:, 0]
    ys = data[:, 1:]
    if log_x:
        keep = x > 0
        x, ys = np.log10(x[keep]), ys[keep]
    finite = ys[np.isfinite(ys)]
    x_lo, x_hi = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    y_lo = min(y_lo, 0.0)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(v):
        return _LEFT + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return _TOP + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if opts["title"]:
        out.append(f'<text x="{_LEFT + pw / 2:.2f}" y="{_TOP - 14}" text-anchor="middle" '
                   f'font-size="13">{escape(opts["title"])}</text>')
    if log_x:
        xticks = [float(k) for k in range(math.ceil(x_lo), math.floor(x_hi) + 1)]
        xlabels = [f"1e{int(k)}" for k in xticks]
    else:
        xticks = _nice_ticks(x_lo, x_hi)
        xlabels = [format(t, ".3g") for t in xticks]
    for t, label in zip(xticks, xlabels):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{_TOP + ph}" x2="{px:.2f}" y2="{_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{_TOP + ph + 18}" text-anchor="middle">{label}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append(f'<line x1="{_LEFT - 5}" y1="{py:.2f}" x2="{_LEFT}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{py + 4:.2f}" text-anchor="end">{format(t, ".3g")}</text>')
    out.append(f'<text x="{_LEFT + pw / 2:.2f}" y="{_H - 15}" text-anchor="middle">'
               f'{escape(columns[0])}{" (log scale)" if log_x else ""}</text>')

    for j, name in enumerate(columns[1:]):
        color = PALETTE[j % len(PALETTE)]
        segment: list[str] = []
        segments = []
        for xv, yv in zip(x, ys[:, j]):
            if np.isfinite(yv):
                segment.append(f"{sx(xv):.2f},{sy(yv):.2f}")
            elif segment:
                segments.append(segment)
                segment = []
        if segment:
            segments.append(segment)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                       f'points="{" ".join(seg)}"/>')
        ly = _TOP + 12 + 16 * j
        lx = _LEFT + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
