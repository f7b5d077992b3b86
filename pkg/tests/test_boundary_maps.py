import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sobex.boundary_maps import (UNIT_CIRCLE, CircleMap, EpsSequence, MapError, cascade_map, compose,
                                 cusp_boundary_map, cusp_levels, cusp_separations, identity_map, invert,
                                 knot_map, random_monotone_map, rotation, spiral_boundary_map,
                                 spiral_separations)
from sobex.geometry import make_cusp_domain, make_spiral_domain, make_square, spiral_layout

TWO_PI = 2 * np.pi


def unwrap_monotone(values):
    a = np.unwrap(np.angle(values))
    return np.all(np.diff(a) > 0)


def test_identity_evaluate():
    th = np.linspace(0, TWO_PI, 50, endpoint=False)
    assert np.allclose(identity_map()(th), np.exp(1j * th), atol=1e-12)
    sq = make_square().boundary
    assert np.allclose(identity_map(sq)(th), sq.param(th))


def test_rotation():
    th = np.linspace(0, TWO_PI, 50)
    assert np.allclose(rotation(0.7)(th), np.exp(1j * (th + 0.7)), atol=1e-12)


def test_knot_interpolation():
    f = knot_map([(0, 0), (np.pi, 1.5 * np.pi), (TWO_PI, TWO_PI)])
    assert f.angle(np.pi / 2) == pytest.approx(0.75 * np.pi)
    assert f(np.pi / 2) == pytest.approx(np.exp(0.75j * np.pi))


def test_group_identity_1000_angles():
    f = random_monotone_map(np.random.default_rng(5))
    th = np.linspace(0, TWO_PI, 1000)
    assert np.max(np.abs(compose(f, invert(f)).angle(th) - th)) < 1e-9
    assert np.max(np.abs(compose(invert(f), f).angle(th) - th)) < 1e-9


def test_compose_mismatch():
    f = identity_map(make_square().boundary)
    with pytest.raises(MapError):
        compose(f, identity_map())


def test_knots_validated():
    with pytest.raises(MapError):
        CircleMap(np.array([0, 1, 0.5, TWO_PI]), np.array([0, 1, 2, TWO_PI]))
    with pytest.raises(MapError):
        CircleMap(np.array([0, TWO_PI]), np.array([0, 2 * TWO_PI]))


def test_round_trip_dict():
    f = random_monotone_map(np.random.default_rng(1))
    g = CircleMap.from_dict(f.to_dict())
    th = np.linspace(0, TWO_PI, 100)
    assert np.allclose(f(th), g(th))


def test_spiral_map_monotone_10k():
    X = make_spiral_domain(50)
    phi = spiral_boundary_map(X)
    th = np.linspace(0, TWO_PI, 10_000, endpoint=False)
    assert np.all(np.diff(phi.angle(th)) > 0)


def test_spiral_map_separations():
    N = 40
    X = make_spiral_domain(N)
    phi = spiral_boundary_map(X)
    a, b, h, _ = spiral_layout(N)
    d = spiral_separations(N)
    ys = np.linspace(0, 1, 21)
    for k in range(N):
        left = phi.at_points(a[k] + 1j * h[k] * ys)
        right = phi.at_points(b[k] + 1j * h[k] * ys)
        sep = np.min(np.abs(left[:, None] - right[None, :]))
        assert sep >= d[k]


def test_spiral_infeasible():
    X = make_spiral_domain(3)
    with pytest.raises(MapError):
        spiral_boundary_map(X, d=[2.5, 1.0, 0.5])
    with pytest.raises(MapError):
        spiral_boundary_map(X, d=[0.5, 1.0, 0.2])


def test_cusp_map_symmetric_and_ordered():
    X = make_cusp_domain(0.5)
    phi = cusp_boundary_map(X, 1.5, N=40)
    y = cusp_levels(EpsSequence(), 40)[1:]
    x = y ** 2
    right = phi.at_points(x + 1j * y)
    left = phi.at_points(-x + 1j * y)
    assert np.allclose(left, np.conj(right), atol=1e-9)
    alpha = np.angle(right)
    assert np.all(np.diff(alpha) < 0) and np.all(alpha > 0)
    assert np.allclose(2 * np.sin(alpha), cusp_separations(40, 1.5), rtol=1e-9)
    assert abs(phi.at_points(0j)[0] - 1) < 1e-12


def test_cusp_map_monotone():
    X = make_cusp_domain(0.7)
    phi = cusp_boundary_map(X, 1.5, N=60)
    th = np.linspace(-np.pi, np.pi, 20_000)
    assert np.all(np.diff(phi.angle(th)) > 0)


def test_cascade_not_lipschitz():
    f = cascade_map(0.7, depth=12)
    g = cascade_map(0.7, depth=14)
    assert g.lipschitz() > 1.5 * f.lipschitz()
    assert np.all(np.diff(f.t) > 0)


def test_eps_sequences():
    e = EpsSequence()
    assert e.tail(1) == pytest.approx(np.pi ** 2 / 6, rel=1e-14)
    k = np.arange(1, 200)
    assert np.allclose(e.tail(k) - e.tail(k + 1), e(k), rtol=1e-10)
    g = EpsSequence.parse("geometric:2")
    assert g.tail(1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        EpsSequence.parse("harmonic:1")


# -- properties ----------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 30))
def test_group_laws(seed, n):
    rng = np.random.default_rng(seed)
    f = random_monotone_map(rng, n)
    g = random_monotone_map(rng, n)
    th = rng.uniform(-10, 10, 1000)
    assert np.max(np.abs(compose(f, g).angle(th) - f.angle(g.angle(th)))) < 1e-9
    assert np.max(np.abs(invert(f).angle(f.angle(th)) - th)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_maps_monotone_degree_one(seed):
    f = random_monotone_map(np.random.default_rng(seed), 20)
    th = np.linspace(0, TWO_PI, 4001)
    t = f.angle(th)
    assert np.all(np.diff(t) > 0)
    assert t[-1] - t[0] == pytest.approx(TWO_PI)
    assert unwrap_monotone(f(th))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.95))
def test_cascade_monotone(w):
    f = cascade_map(w, depth=10)
    assert np.all(np.diff(f.angle(np.linspace(0, TWO_PI, 3000))) > 0)
