import math
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geopack.models import CircleConfig, HexConfig, PointConfig, hex_lattice_sites
from geopack.render import (
    CANVAS,
    MARGIN,
    MAX_COLOR,
    MIN_COLOR,
    RenderError,
    extreme_pairs,
    render,
    render_config,
)
from geopack.solution import SolutionFile
from geopack.validator import validate

SQ3 = math.sqrt(3.0)


def _count(svg: str, pattern: str) -> int:
    return len(re.findall(pattern, svg))


def test_triangle_pairs_all_red():
    svg = render_config(PointConfig([[0, 0], [1, 0], [0.5, SQ3 / 2]]))
    assert _count(svg, 'class="point"') == 3
    assert _count(svg, f'stroke="{MAX_COLOR}"') == 3
    assert _count(svg, f'stroke="{MIN_COLOR}"') == 0


def test_square_pairs():
    svg = render_config(PointConfig([[0, 0], [1, 0], [1, 1], [0, 1]]))
    assert _count(svg, 'class="max-pair"') == 2
    assert _count(svg, 'class="min-pair"') == 4
    # blue first, red drawn on top
    assert svg.index('class="min-pair"') < svg.index('class="max-pair"')


def test_single_circle_stable():
    cfg = CircleConfig([[0.5, 0.5]], [0.5])
    a, b = render_config(cfg), render_config(cfg)
    assert a == b
    assert _count(a, 'class="container"') == 1
    assert _count(a, 'class="disk"') == 1
    assert f'width="{CANVAS:.3f}"' in a


def test_rectangle_aspect():
    cfg = CircleConfig([[0.25, 0.5]], [0.25], alpha=0.5, variant="rectangle")
    svg = render_config(cfg)
    m = re.search(r'class="container" x="([\d.]+)" y="([\d.]+)" width="([\d.]+)" '
                  r'height="([\d.]+)"', svg)
    w, h = float(m.group(3)), float(m.group(4))
    assert h / w == pytest.approx(3.0, rel=1e-4)


def _poly_points(svg: str, cls: str):
    out = []
    for m in re.finditer(rf'class="{cls}" points="([^"]+)"', svg):
        out.append(np.array([[float(v) for v in p.split(",")] for p in m.group(1).split()]))
    return out


def test_thirteen_hexagons_unclipped():
    cfg = HexConfig(4.0, hex_lattice_sites(13, SQ3), np.zeros(13))
    svg = render_config(cfg)
    tiles = _poly_points(svg, "tile")
    (outer,) = _poly_points(svg, "container")
    assert len(tiles) == 13
    fills = re.findall(r'class="tile" points="[^"]+" fill="([^"]+)"', svg)
    assert len(set(fills)) == 13
    # every tile vertex lies inside the convex outer polygon
    c = outer.mean(axis=0)
    for tile in tiles:
        assert np.all((tile >= MARGIN - 1e-3) & (tile <= CANVAS - MARGIN + 1e-3))
        for k in range(6):
            a, b = outer[k], outer[(k + 1) % 6]
            e = (b - a) / np.linalg.norm(b - a)
            normal = np.array([-e[1], e[0]])
            if normal @ (c - a) < 0:
                normal = -normal
            # signed pixel distance from the container edge, rounding allowance 0.01 px
            assert np.all((tile - a) @ normal >= -1e-2)


def test_three_dimensional_points_projected():
    rng = np.random.default_rng(1)
    svg = render_config(PointConfig(rng.normal(size=(6, 3))))
    assert _count(svg, 'class="point"') == 6


def test_one_dimensional_points():
    svg = render_config(PointConfig([[0.0], [1.0], [2.5]]))
    assert _count(svg, 'class="point"') == 3
    assert _count(svg, 'class="max-pair"') == 1
    assert _count(svg, 'class="min-pair"') == 1


def test_refuses_infeasible():
    with pytest.raises(RenderError):
        render_config(HexConfig(3.0, [[0, 0], [0.5, 0]], [0, 0]))
    with pytest.raises(RenderError):
        render_config(PointConfig([[0, 0], [0, 0]]))


@given(st.integers(2, 9), st.integers(1, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_extreme_pairs_within_tolerance(n, d, seed):
    pts = np.random.default_rng(seed).normal(size=(n, d))
    mx, mn = extreme_pairs(pts)
    dist = {(i, j): float(np.linalg.norm(pts[i] - pts[j])) for i in range(n) for j in range(i + 1, n)}
    lo, hi = min(dist.values()), max(dist.values())
    assert mx
    for p in mx:
        assert dist[p] / lo >= hi / lo - 1e-9
    for p in mn:
        assert dist[p] / lo <= 1.0 + 1e-9
    assert not set(mx) & set(mn)
    svg = render_config(PointConfig(pts))
    assert _count(svg, 'class="max-pair"') == len(mx)
    assert _count(svg, 'class="min-pair"') == len(mn)


def test_render_solution_file_byte_identical():
    sol = SolutionFile.from_verdict(validate(CircleConfig([[0.3, 0.3], [0.75, 0.75]],
                                                          [0.25, 0.2])))
    again = SolutionFile.loads(sol.dumps())
    assert render(sol).encode() == render(again).encode()
