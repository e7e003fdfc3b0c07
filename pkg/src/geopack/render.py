"""Deterministic SVG figures of certified configurations.

Output depends only on the configuration: elements are emitted in a fixed
order and every coordinate is printed with three decimals on a
1000 x 1000 canvas. Min-max point sets are drawn in their first two
coordinates with red segments for maximum-distance pairs over blue segments
for minimum-distance pairs. When a pair is both (all distances equal) it is
drawn once, in red.
"""

from __future__ import annotations

import numpy as np

from .geometry import vertices
from .kernels.structure import pair_indices
from .models import CircleConfig, HexConfig, PointConfig
from .validator import validate

CANVAS = 1000.0
MARGIN = 50.0
PAIR_TOL = 1e-9
MAX_COLOR = "#d62728"
MIN_COLOR = "#1f77b4"

__all__ = ["RenderError", "extreme_pairs", "render", "render_config"]


class RenderError(ValueError):
    pass


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Frame:
    """Maps a world bounding box onto the canvas, y pointing up."""

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        span = max(float(np.max(hi - lo)), 1e-12)
        self.scale = (CANVAS - 2.0 * MARGIN) / span
        self.lo = lo
        # centre the box inside the drawable square
        self.off = MARGIN + 0.5 * ((CANVAS - 2.0 * MARGIN) - (hi - lo) * self.scale)

    def xy(self, p) -> tuple[str, str]:
        x = self.off[0] + (p[0] - self.lo[0]) * self.scale
        y = CANVAS - (self.off[1] + (p[1] - self.lo[1]) * self.scale)
        return _f(x), _f(y)

    def length(self, v: float) -> str:
        return _f(v * self.scale)

    def polygon(self, pts) -> str:
        return " ".join(",".join(self.xy(p)) for p in pts)


def _header(title: str) -> list[str]:
    c = _f(CANVAS)
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" '
        f'viewBox="0 0 {c} {c}">',
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{c}" height="{c}" fill="#ffffff"/>',
    ]


def extreme_pairs(points, tol: float = PAIR_TOL) -> tuple[list, list]:
    """Pairs at maximum and at minimum distance, ``(max_pairs, min_pairs)``.

    Distances are compared after scaling the set so that its smallest
    distance is one. A pair within ``tol`` of both extremes is listed only
    among the maximum pairs.
    """
    pts = np.asarray(points, dtype=float)
    pi, pj = pair_indices(len(pts))
    dist = np.sqrt(((pts[pi] - pts[pj]) ** 2).sum(axis=1))
    dist = dist / dist.min()
    is_max = dist >= dist.max() - tol
    is_min = (dist <= dist.min() + tol) & ~is_max
    mx = [(int(i), int(j)) for i, j in zip(pi[is_max], pj[is_max])]
    mn = [(int(i), int(j)) for i, j in zip(pi[is_min], pj[is_min])]
    return mx, mn


def _points_svg(cfg: PointConfig) -> list[str]:
    pts = cfg.points
    if pts.shape[1] == 1:
        pts = np.hstack([pts, np.zeros_like(pts)])
    pts2 = pts[:, :2]
    lo, hi = pts2.min(axis=0), pts2.max(axis=0)
    frame = _Frame(lo, hi)
    mx, mn = extreme_pairs(cfg.points)
    out = _header(f"min-max ratio, n={cfg.n}, d={cfg.d}")
    for color, pairs, cls in ((MIN_COLOR, mn, "min-pair"), (MAX_COLOR, mx, "max-pair")):
        for i, j in pairs:
            (x1, y1), (x2, y2) = frame.xy(pts2[i]), frame.xy(pts2[j])
            out.append(f'<line class="{cls}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                       f'stroke="{color}" stroke-width="2"/>')
    for p in pts2:
        x, y = frame.xy(p)
        out.append(f'<circle class="point" cx="{x}" cy="{y}" r="6" fill="#000000"/>')
    return out


def _circles_svg(cfg: CircleConfig) -> list[str]:
    w, h = cfg.alpha, cfg.height
    frame = _Frame((0.0, 0.0), (w, h))
    out = _header(f"circles in a {cfg.variant}, n={cfg.n}")
    x0, y0 = frame.xy((0.0, h))
    out.append(f'<rect class="container" x="{x0}" y="{y0}" width="{frame.length(w)}" '
               f'height="{frame.length(h)}" fill="none" stroke="#000000" stroke-width="2"/>')
    for (cx, cy), r in zip(cfg.centers, cfg.radii):
        x, y = frame.xy((cx, cy))
        out.append(f'<circle class="disk" cx="{x}" cy="{y}" r="{frame.length(r)}" '
                   f'fill="#9ecae1" stroke="#08519c" stroke-width="1"/>')
    return out


def _fill(i: int) -> str:
    # golden-angle hues keep neighbouring indices visually distinct
    return f"hsl({_f((i * 137.50776405) % 360.0)},65%,70%)"


def _hexagons_svg(cfg: HexConfig) -> list[str]:
    R = cfg.R
    outer = vertices(0.0, 0.0, 0.0, side=R)
    frame = _Frame((-R, -R), (R, R))
    out = _header(f"hexagons, n={cfg.n}, R={_f(R)}")
    out.append(f'<polygon class="container" points="{frame.polygon(outer)}" '
               f'fill="#f0f0f0" stroke="#000000" stroke-width="2"/>')
    for i, ((cx, cy), th) in enumerate(zip(cfg.centers, cfg.thetas)):
        out.append(f'<polygon class="tile" points="{frame.polygon(vertices(cx, cy, th))}" '
                   f'fill="{_fill(i)}" stroke="#333333" stroke-width="1"/>')
    return out


def render_config(config, tol: float = 1e-9) -> str:
    """SVG document for a configuration; refuses infeasible input."""
    verdict = validate(config, tol)
    if not verdict.feasible:
        worst = ", ".join(name for name, _ in verdict.worst(3))
        raise RenderError(f"refusing to render an infeasible configuration ({worst})")
    cfg = verdict.config
    if isinstance(cfg, PointConfig):
        lines = _points_svg(cfg)
    elif isinstance(cfg, CircleConfig):
        lines = _circles_svg(cfg)
    else:
        lines = _hexagons_svg(cfg)
    return "\n".join(lines + ["</svg>"]) + "\n"


def render(solution, tol: float = 1e-9) -> str:
    """SVG document for a :class:`~geopack.solution.SolutionFile`."""
    return render_config(solution.config, tol)
