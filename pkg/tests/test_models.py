import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geopack.geometry import RHO, halfspaces
from geopack.models import (
    ALPHA_MIN,
    CircleConfig,
    HexConfig,
    ModelError,
    PointConfig,
    build,
    build_circles,
    build_hexagons,
    build_minmax_dual,
    build_minmax_primal,
    decode,
    dual_to_primal,
    encode,
    feasible_witness,
    primal_to_dual,
)
from geopack.nlp import NlpError, evaluate


def test_minmax_counts_small():
    p = build_minmax_primal(3, 2)
    assert p.num_vars == 7
    assert p.num_constraints == 6
    assert p.lower[-1] == 1.0  # t_max >= 1 as a bound


def test_minmax_counts_large():
    assert build_minmax_primal(30, 3).num_vars == 91
    assert build_minmax_dual(30, 3).num_vars == 91


@pytest.mark.parametrize("n", [1, 2, 7, 13, 25, 40])
def test_closed_form_counts(n):
    P = n * (n - 1) // 2
    c = build_circles(n)
    assert (c.num_vars, c.num_constraints) == (3 * n + 1, 5 * n + P)
    lit = build_hexagons(n, eliminate=False)
    assert (lit.num_vars, lit.num_constraints) == (1 + 3 * n + 18 * n + 12 * P, 54 * n + 4 * P)
    red = build_hexagons(n, eliminate=True)
    assert (red.num_vars, red.num_constraints) == (1 + 3 * n + 12 * P, 36 * n + 4 * P)
    if n >= 2:
        m = build_minmax_primal(n, 3)
        assert (m.num_vars, m.num_constraints) == (3 * n + 1, 2 * P)


@pytest.mark.parametrize("args", [(1, 2), (0, 2), (3, 0)])
def test_minmax_construction_errors(args):
    with pytest.raises(ModelError):
        build_minmax_primal(*args)
    with pytest.raises(ModelError):
        build_minmax_dual(*args)


def test_other_construction_errors():
    with pytest.raises(ModelError):
        build_circles(0)
    with pytest.raises(ModelError):
        build_circles(3, "triangle")
    with pytest.raises(ModelError):
        build_hexagons(0)
    with pytest.raises(ModelError):
        build("spheres", 3)


def test_circle_bounds():
    sq = build_circles(2, "square")
    rect = build_circles(2, "rectangle")
    assert sq.lower[-1] == sq.upper[-1] == 1.0
    assert rect.lower[-1] == ALPHA_MIN and rect.upper[-1] == 1.0


def test_hexagon_bounds():
    p = build_hexagons(4)
    assert p.lower[0] == 2.0  # R >= sqrt(n)
    assert p.lower[9] == 0.0 and p.upper[9] == pytest.approx(math.pi / 3)
    assert np.all(p.upper[1:9] == 4.0)


def test_encode_point_ordering():
    p = build_minmax_primal(2, 1)
    x = encode(p, PointConfig([[0.0], [1.0]], t_min=1.0, t_max=1.0))
    np.testing.assert_array_equal(x, [0.0, 1.0, 1.0])


def test_hex_vector_length():
    assert build_hexagons(2, eliminate=False).num_vars == 1 + 4 + 2 + 36 + 12


def test_encode_dimension_mismatch():
    with pytest.raises(NlpError):
        encode(build_minmax_primal(3, 2), PointConfig(np.zeros((3, 3))))
    with pytest.raises(NlpError):
        encode(build_circles(2), CircleConfig(np.zeros((3, 2)), np.zeros(3)))
    with pytest.raises(NlpError):
        encode(build_hexagons(2), PointConfig(np.zeros((2, 2))))
    with pytest.raises(NlpError):
        decode(build_circles(2), np.zeros(5))


finite = st.floats(-10, 10, allow_nan=False)


@given(st.integers(1, 6), st.sampled_from(["square", "rectangle"]), st.data())
@settings(max_examples=40, deadline=None)
def test_circle_round_trip(n, variant, data):
    c = np.array(data.draw(st.lists(finite, min_size=2 * n, max_size=2 * n))).reshape(n, 2)
    r = np.array(data.draw(st.lists(st.floats(0, 0.5), min_size=n, max_size=n)))
    a = data.draw(st.floats(ALPHA_MIN, 1.0)) if variant == "rectangle" else 1.0
    p = build_circles(n, variant)
    back = decode(p, encode(p, CircleConfig(c, r, a, variant)))
    np.testing.assert_array_equal(back.centers, c)
    np.testing.assert_array_equal(back.radii, r)
    assert back.alpha == a and back.variant == variant


@given(st.integers(1, 4), st.booleans(), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_hex_round_trip(n, eliminate, seed):
    rng = np.random.default_rng(seed)
    P = n * (n - 1) // 2
    cfg = HexConfig(rng.uniform(1, 5), rng.normal(size=(n, 2)), rng.uniform(0, 1, n),
                    rng.dirichlet(np.ones(12), P) if P else None)
    p = build_hexagons(n, eliminate=eliminate)
    back = decode(p, encode(p, cfg))
    assert back.R == cfg.R
    np.testing.assert_array_equal(back.centers, cfg.centers)
    np.testing.assert_array_equal(back.thetas, cfg.thetas)
    np.testing.assert_array_equal(back.farkas, cfg.farkas)


@given(st.integers(2, 6), st.integers(1, 4), st.booleans(), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_point_round_trip(n, d, dual, seed):
    rng = np.random.default_rng(seed)
    p = build_minmax_dual(n, d) if dual else build_minmax_primal(n, d)
    x = rng.normal(size=p.num_vars)
    np.testing.assert_array_equal(encode(p, decode(p, x)), x)


@pytest.mark.parametrize("family,kw", [
    ("minmax", {"d": 1}), ("minmax", {"d": 3}),
    ("minmax", {"d": 2, "formulation": "dual"}),
    ("circles", {"variant": "square"}), ("circles", {"variant": "rectangle"}),
    ("hexagons", {"eliminate": True}), ("hexagons", {"eliminate": False}),
])
@pytest.mark.parametrize("n", [2, 3, 7, 12])
def test_witness_feasible(family, kw, n):
    p = build(family, n, **kw)
    ev = evaluate(p, feasible_witness(p))
    assert ev.max_violation <= 1e-12


def test_single_hexagon_witness_is_concentric():
    p = build_hexagons(1)
    cfg = decode(p, feasible_witness(p))
    assert cfg.R == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_array_equal(cfg.centers, [[0.0, 0.0]])


def test_canonical_orientation_minmax():
    # points at squared distance in [1, t_max] satisfy the printed forms
    p = build_minmax_primal(3, 2)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    ev = evaluate(p, encode(p, PointConfig(pts, 1.0, 1.0)))
    assert np.all(ev.constraint_values <= 1e-15)


@given(st.integers(2, 6), st.integers(1, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_primal_dual_transform(n, d, seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, d))
    diff = pts[:, None] - pts[None]
    D = (diff**2).sum(-1)[np.triu_indices(n, 1)]
    pts = pts / math.sqrt(D.min())
    primal = PointConfig(pts, 1.0, float(D.max() / D.min()))
    dual = primal_to_dual(primal)
    assert dual.t_max == 1.0
    assert dual.t_min == pytest.approx(1.0 / primal.t_max, rel=1e-14)
    pd, pp = build_minmax_dual(n, d), build_minmax_primal(n, d)
    evd = evaluate(pd, encode(pd, dual)).constraint_values
    assert evd.max() <= 1e-12
    back = dual_to_primal(dual)
    np.testing.assert_allclose(back.points, primal.points, rtol=1e-13, atol=1e-13)
    assert evaluate(pp, encode(pp, back)).constraint_values.max() <= 1e-12


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-3, 3))
def test_halfspace_invariants(cx, cy, theta):
    h = halfspaces(cx, cy, theta)
    np.testing.assert_allclose(np.hypot(h.normals[:, 0], h.normals[:, 1]), 1.0, rtol=1e-15)
    np.testing.assert_allclose(h.slack([cx, cy]), RHO, atol=1e-12)


def test_config_arrays_agree_with_halfspaces():
    cfg = HexConfig(3.0, [[0.3, -0.2], [1.5, 1.0]], [0.1, 0.7])
    a, b, c = cfg.halfspace_arrays()
    for i, pose in enumerate(cfg.poses()):
        h = halfspaces(*pose)
        np.testing.assert_allclose(h.normals[:, 0], a[i], atol=1e-15)
        np.testing.assert_allclose(h.normals[:, 1], b[i], atol=1e-15)
        np.testing.assert_allclose(h.offsets, c[i], atol=1e-15)
