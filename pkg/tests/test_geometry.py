import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sobex.geometry import (GeometryError, JordanCurve, arc_length, constant_speed_param, contains,
                            dist_to_boundary, make_cusp_domain, make_disk, make_polygon, make_regular_polygon,
                            make_spiral_domain, make_square, make_target_Ytau, segment_distance)

# fine graded polyline of y = |x|^(1/2) on [-1, 1], 10^6 segments
GRAPH_LENGTH_ORACLE = 2.9578857150884574
# nearest of 10^7 exact boundary samples of X_{1/2} to the point 0.1i
DIST_ORACLE = 0.009809369843516044


def test_circle_length():
    assert abs(arc_length(make_disk(4096).boundary) - 2 * np.pi) < 1e-5


def test_square_length():
    assert arc_length(make_square().boundary) == pytest.approx(4.0, abs=1e-14)


def test_cusp_graph_length():
    X = make_cusp_domain(0.5)
    v = X.boundary.vertices
    # graph part: from the left end (-1, 1) through the tip to (1, 1)
    right_end = int(np.flatnonzero(np.isclose(v, 1 + 1j))[0])
    left_start = int(np.flatnonzero(np.isclose(v, -1 + 1j))[0])
    graph = np.r_[v[left_start:-1], v[:right_end + 1]]
    length = np.sum(np.abs(np.diff(graph)))
    assert length == pytest.approx(GRAPH_LENGTH_ORACLE, rel=1e-6)


def test_circle_param_phase():
    c = make_disk(4096).boundary
    th = np.linspace(0, 6, 13)
    assert np.allclose(c.param(th), np.exp(1j * th), atol=1e-12)


def test_square_param_half_perimeter():
    g = constant_speed_param(make_square().boundary)
    assert abs(g(np.pi) - (1 + 1j)) < 1e-6


def test_cusp_param_constant_speed():
    c = make_cusp_domain(0.5).boundary
    th = np.linspace(0.1, 6.1, 2001)
    h = 1e-5
    speed = np.abs(c.param(th + h) - c.param(th - h)) / (2 * h)
    # away from polyline corners the finite-difference speed is exact
    assert np.median(np.abs(speed - c.length / (2 * np.pi))) < 1e-6
    assert np.max(speed) <= c.length / (2 * np.pi) * (1 + 1e-6)


def test_degenerate_curve_rejected():
    with pytest.raises(GeometryError):
        JordanCurve([0j, 0j, 0j])


def test_dist_examples():
    assert dist_to_boundary(make_disk(), 0j) == pytest.approx(1.0)
    assert dist_to_boundary(make_square(), 0.5 + 0.5j) == pytest.approx(0.5)


def test_cusp_dist_oracle():
    X = make_cusp_domain(0.5)
    assert X.dist(0.1j) == pytest.approx(DIST_ORACLE, rel=1e-4)


def test_contains_examples():
    D = make_disk()
    assert contains(D, 0j)
    assert not contains(D, 2 + 0j)
    assert not contains(D, 1 + 0j)
    S = make_square()
    assert not S.contains(1 + 0.5j)


def test_cusp_parameter_checked():
    for s in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(GeometryError):
            make_cusp_domain(s)


def test_cusp_shape():
    X = make_cusp_domain(0.5)
    assert X.contains(0.5j) and X.contains(1.9j)
    assert not X.contains(0.5 + 0.1j)
    assert np.min(np.abs(X.boundary.vertices)) == 0.0


def test_spiral_three_rectangles():
    w = 2.0 ** -np.arange(1, 4)
    X = make_spiral_domain(3, widths=w, heights=1 / np.arange(1, 4))
    from sobex.geometry import spiral_layout
    a, b, h, t = spiral_layout(3, widths=w, heights=1 / np.arange(1, 4))
    assert np.allclose(h, [1, 1 / 2, 1 / 3])
    for k in range(3):
        mid = 0.5 * (a[k] + b[k])
        assert X.contains(mid + 0.5j * h[k])
        # open rectangles continue into the connector strip, the last is capped
        top = h[k] + (t[k] if k < 2 else 0.0)
        assert not X.contains(mid + 1j * (top + 1e-3))
    assert X.boundary.is_simple()


def test_spiral_single():
    X = make_spiral_domain(1)
    assert X.boundary.is_simple()
    assert X.contains(X.witness)


def test_spiral_length_lower_bound():
    L = arc_length(make_spiral_domain(50).boundary)
    H50 = np.sum(1.0 / np.arange(1, 51))
    assert L > 2 * H50


def test_spiral_increments():
    lengths = [arc_length(make_spiral_domain(N).boundary) for N in range(1, 12)]
    h = 1.0 / np.arange(1, 12)
    assert np.all(np.diff(lengths) >= 2 * h[1:])


def test_spiral_overlap_rejected():
    with pytest.raises(GeometryError):
        make_spiral_domain(3, gaps=[-1, 1, 1])


def test_ytau_through_origin():
    Y = make_target_Ytau(0.5)
    assert np.min(np.abs(Y.boundary.vertices)) == 0.0
    assert Y.boundary.is_simple()


@pytest.mark.parametrize("make", [lambda: make_disk(512), make_square, lambda: make_regular_polygon(5),
                                  lambda: make_cusp_domain(0.3), lambda: make_cusp_domain(0.7),
                                  lambda: make_spiral_domain(8), lambda: make_target_Ytau(1.0)])
def test_catalog_witness_and_simplicity(make):
    X = make()
    assert X.contains(X.witness)
    assert X.boundary.is_simple()


def test_nonsimple_rejected():
    with pytest.raises(GeometryError):
        make_polygon([0, 1 + 1j, 1, 1j])


def test_shapely_simplicity_oracle():
    shapely = pytest.importorskip("shapely")
    from shapely.geometry import LinearRing
    rng = np.random.default_rng(3)
    for _ in range(40):
        v = rng.uniform(-1, 1, 7) + 1j * rng.uniform(-1, 1, 7)
        ring = LinearRing(np.c_[v.real, v.imag])
        c = JordanCurve(v, check_simple=False)
        assert c.is_simple() == ring.is_simple


def test_dist_matches_brute_force_on_many_points():
    X = make_cusp_domain(0.5)
    rng = np.random.default_rng(0)
    z = rng.uniform(-1, 1, 3000) + 1j * rng.uniform(0, 2, 3000)
    z = np.r_[z, 1e-4 * z]
    a, b = X.boundary.vertices[:-1], X.boundary.vertices[1:]
    ref = np.concatenate([segment_distance(z[i:i + 200, None], a[None], b[None]).min(1)
                          for i in range(0, z.size, 200)])
    assert np.max(np.abs(X.dist(z) - ref)) < 1e-12


# -- properties ----------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * np.pi))
def test_length_invariant_under_rigid_motion(dx, dy, rot):
    v = make_regular_polygon(7).boundary.vertices[:-1]
    moved = JordanCurve(np.exp(1j * rot) * v + complex(dx, dy))
    assert abs(moved.length - JordanCurve(v).length) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 400))
def test_constant_speed_chords(n):
    c = make_square().boundary
    th = 2 * np.pi * np.arange(n + 1) / n
    arc = np.diff(c.cumulative_arclength[-1] * th / (2 * np.pi))
    pts = c.param(th)
    # arc between consecutive samples is equal; chords never exceed it
    assert np.all(np.abs(pts[1:] - pts[:-1]) <= arc + 1e-12)
    s = c.locate(pts)
    gaps = np.diff(np.r_[s[:-1], c.length]) if n > 1 else [c.length]
    assert np.allclose(gaps, c.length / n, atol=1e-6 * c.length)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_disk_membership_and_distance(x, y):
    z = complex(x, y)
    D = make_disk()
    assert D.contains(z) == (abs(z) < 1)
    assert D.dist(z) == pytest.approx(abs(1 - abs(z)), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_square_distance_polyline(x, y):
    S = make_square()
    z = complex(x, y)
    assert S.dist(z) == pytest.approx(min(x, y, 1 - x, 1 - y), abs=1e-14)
