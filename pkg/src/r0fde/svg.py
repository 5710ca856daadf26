"""Minimal static SVG line charts (polylines, axes, tick labels, legend)."""
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def line_chart(t, series, labels=None, title="", width=720, height=420, margin=56):
    t = np.asarray(t, dtype=float)
    ys = np.atleast_2d(np.asarray(series, dtype=float))
    labels = labels or [f"u{i + 1}" for i in range(len(ys))]
    x0, x1 = float(t.min()), float(t.max())
    y0, y1 = float(min(0.0, ys.min())), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = width - 2 * margin, height - 2 * margin

    def px(x):
        return margin + (x - x0) / (x1 - x0) * pw

    def py(y):
        return height - margin - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
    ]
    for k in range(5):
        xv = x0 + k * (x1 - x0) / 4
        yv = y0 + k * (y1 - y0) / 4
        out.append(f'<text x="{px(xv):.1f}" y="{height - margin + 16}" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{margin - 6}" y="{py(yv) + 4:.1f}" text-anchor="end">{yv:.4g}</text>')
    if title:
        out.append(f'<text x="{width / 2}" y="{margin / 2}" text-anchor="middle" font-size="13">{escape(title)}</text>')
    stride = max(1, len(t) // 2000)
    for i, y in enumerate(ys):
        colour = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(t[::stride], y[::stride]))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        ly = margin + 14 * i
        out.append(f'<line x1="{width - margin - 60}" y1="{ly}" x2="{width - margin - 40}" y2="{ly}" stroke="{colour}"/>')
        out.append(f'<text x="{width - margin - 36}" y="{ly + 4}">{escape(labels[i])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_line_chart(path, t, series, **kw):
    with open(path, "w") as fh:
        fh.write(line_chart(t, series, **kw))
