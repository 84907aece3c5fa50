"""Static SVG figures of trajectories.

Output is plain deterministic SVG text. Point markers carry ``data-step``
and ``data-point`` attributes so the figure can be checked programmatically.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .align import match_configurations
from .errors import ValidationError
from .trajectory import TrajectoryRecord

SIZE = 600
MARGIN = 50


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class _Canvas:
    def __init__(self, xmin, xmax, ymin, ymax, square=True):
        xspan = (xmax - xmin) or 1.0
        yspan = (ymax - ymin) or 1.0
        inner = SIZE - 2 * MARGIN
        if square:
            span = max(xspan, yspan)
            xmin -= (span - xspan) / 2
            ymin -= (span - yspan) / 2
            xspan = yspan = span
        self.xmin, self.ymin = xmin, ymin
        self.sx, self.sy = inner / xspan, inner / yspan
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">',
            f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        ]

    def px(self, x, y):
        return (MARGIN + (x - self.xmin) * self.sx, SIZE - MARGIN - (y - self.ymin) * self.sy)

    def add(self, element: str):
        self.parts.append(element)

    def axis_labels(self, xlabel, ylabel):
        self.add(f'<text x="{SIZE / 2}" y="{SIZE - 12}" text-anchor="middle" font-size="14">{escape(xlabel)}</text>')
        self.add(
            f'<text x="16" y="{SIZE / 2}" text-anchor="middle" font-size="14" '
            f'transform="rotate(-90 16 {SIZE / 2})">{escape(ylabel)}</text>'
        )

    def text(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _aligned(configs):
    if len(configs) < 2:
        return list(configs)
    return list(match_configurations(configs).configs)


def _markers(canvas, coords, labels):
    m = len(coords)
    for step, c in enumerate(coords):
        final = step == m - 1
        for i, (x, y) in enumerate(c):
            cx, cy = canvas.px(x, y)
            cls, r, col = ("final", 4, "blue") if final else ("point", 1.5, "red")
            canvas.add(
                f'<circle class="{cls}" data-step="{step}" data-point="{i}" '
                f'cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{r}" fill="{col}"/>'
            )
    for i, (x, y) in enumerate(coords[-1]):
        cx, cy = canvas.px(x, y)
        canvas.add(
            f'<text class="label" data-point="{i}" x="{_fmt(cx + 6)}" y="{_fmt(cy - 6)}" '
            f'font-size="12">{escape(labels[i])}</text>'
        )


def _tracks(canvas, coords):
    n = coords[0].shape[0]
    for i in range(n):
        pts = " ".join("{},{}".format(*map(_fmt, canvas.px(*c[i]))) for c in coords)
        canvas.add(f'<polyline class="track" data-point="{i}" points="{pts}" fill="none" stroke="black" stroke-width="0.6"/>')


def plot_2d(record: TrajectoryRecord, labels, dims=(0, 1)) -> str:
    """Aligned configurations for every lambda, joined per point."""
    s, t = dims
    if max(s, t) >= record.p:
        raise ValidationError(f"dims {s + 1},{t + 1} exceed p={record.p}")
    coords = _aligned([r.x[:, [s, t]] for r in record.results])
    allc = np.vstack(coords)
    canvas = _Canvas(allc[:, 0].min(), allc[:, 0].max(), allc[:, 1].min(), allc[:, 1].max())
    _tracks(canvas, coords)
    _markers(canvas, coords, labels)
    canvas.axis_labels(f"dim {s + 1}", f"dim {t + 1}")
    return canvas.text()


def plot_1d(record: TrajectoryRecord, labels, dim: int = 0) -> str:
    """Point index on the horizontal axis, coordinate on the vertical one.

    Horizontal lines mark the final coordinates so their order is visible.
    """
    if dim >= record.p:
        raise ValidationError(f"dim {dim + 1} exceeds p={record.p}")
    values = _aligned([r.x[:, [dim]] for r in record.results])
    n = values[0].shape[0]
    index = np.arange(1, n + 1, dtype=float)
    coords = [np.column_stack([index, v[:, 0]]) for v in values]
    allv = np.concatenate([v[:, 0] for v in values])
    canvas = _Canvas(1.0, float(n), allv.min(), allv.max(), square=False)
    for i, y in enumerate(values[-1][:, 0]):
        x0, cy = canvas.px(1.0, y)
        x1, _ = canvas.px(float(n), y)
        canvas.add(
            f'<line class="hline" data-point="{i}" x1="{_fmt(x0)}" y1="{_fmt(cy)}" '
            f'x2="{_fmt(x1)}" y2="{_fmt(cy)}" stroke="grey" stroke-width="0.5"/>'
        )
    _tracks(canvas, coords)
    _markers(canvas, coords, labels)
    canvas.axis_labels("index", "x")
    return canvas.text()
