"""Deterministic SVG renderings of 2-d covers.

Hand-rolled SVG text so byte output depends only on the inputs: data points
as small squares, selected centers as crosses, and one ball outline per
selected point (circle for l2, axis-aligned square for linf, diamond for l1).
"""

import numpy as np

from .covering import CoverSolution
from .dataset import NormSpec, L2
from .errors import DataError

_CLASS_COLORS = ("#4878cf", "#e8a33d", "#6acc65", "#d65f5f", "#956cb4", "#8c613c")
_SIZE = 640.0
_PAD = 20.0


def _f(v: float) -> str:
    return f"{v:.3f}"


def cover_svg(points, labels, sol: CoverSolution, norm: NormSpec = L2) -> str:
    """SVG document for a 2-d dataset and one of its cover solutions."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != 2:
        raise DataError(f"plotting needs 2-d points, got dim {pts.shape[1]}")
    labels = np.zeros(len(pts), dtype=np.int64) if labels is None else np.asarray(labels)
    eta = float(sol.eta)

    lo = pts.min(axis=0) - eta
    hi = pts.max(axis=0) + eta
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    scale = (_SIZE - 2 * _PAD) / span

    def sx(x):
        return _PAD + (x - lo[0]) * scale

    def sy(y):
        return _SIZE - _PAD - (y - lo[1]) * scale  # flip: svg y grows downward

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(_SIZE)}" '
        f'height="{int(_SIZE)}" viewBox="0 0 {int(_SIZE)} {int(_SIZE)}">',
        f'<rect width="{int(_SIZE)}" height="{int(_SIZE)}" fill="white"/>',
    ]

    r = eta * scale
    for i in sol.selected:
        cx, cy = sx(pts[i, 0]), sy(pts[i, 1])
        color = _CLASS_COLORS[int(labels[i]) % len(_CLASS_COLORS)]
        if norm.p == 2.0:
            out.append(
                f'<circle class="ball" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" '
                f'fill="none" stroke="{color}" stroke-width="1"/>'
            )
        elif norm.p == float("inf"):
            out.append(
                f'<rect class="ball" x="{_f(cx - r)}" y="{_f(cy - r)}" '
                f'width="{_f(2 * r)}" height="{_f(2 * r)}" fill="none" '
                f'stroke="{color}" stroke-width="1"/>'
            )
        else:
            path = (
                f"M {_f(cx)} {_f(cy - r)} L {_f(cx + r)} {_f(cy)} "
                f"L {_f(cx)} {_f(cy + r)} L {_f(cx - r)} {_f(cy)} Z"
            )
            out.append(
                f'<path class="ball" d="{path}" fill="none" stroke="{color}" stroke-width="1"/>'
            )

    for i, (x, y) in enumerate(pts):
        color = _CLASS_COLORS[int(labels[i]) % len(_CLASS_COLORS)]
        px, py = sx(x), sy(y)
        out.append(
            f'<rect class="pt" x="{_f(px - 1.5)}" y="{_f(py - 1.5)}" width="3" height="3" '
            f'fill="{color}"/>'
        )

    for i in sol.selected:
        px, py = sx(pts[i, 0]), sy(pts[i, 1])
        out.append(
            f'<path class="center" d="M {_f(px - 4)} {_f(py)} L {_f(px + 4)} {_f(py)} '
            f'M {_f(px)} {_f(py - 4)} L {_f(px)} {_f(py + 4)}" '
            f'stroke="black" stroke-width="1.5"/>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
