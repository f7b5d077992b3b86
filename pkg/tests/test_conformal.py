import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sobex.conformal import (SingularPointError, disk_automorphism, hardy_norm, identity, koebe_ratio, moebius,
                             parse_map, phi_tau)
from sobex.geometry import make_disk, make_target_Ytau


def test_identity_eval():
    assert identity()(0.3 + 0.4j) == 0.3 + 0.4j


def test_phi_tau_vanishes_at_one():
    f = phi_tau(0.5)
    r = 1 - 10.0 ** -np.arange(1, 9)
    v = np.abs(f(r + 0j))
    assert np.all(np.diff(v) < 0)
    assert v[-1] < 0.3


def test_phi_one_derivative_finite_difference():
    f = phi_tau(1.0)
    h = 1e-6
    fd = (f(h + 0j) - f(-h + 0j)) / (2 * h)
    assert abs(f.derivative(0j) - fd) < 1e-6 * abs(fd)


def test_singular_point_rejected():
    with pytest.raises(SingularPointError):
        phi_tau(1.0)(1.0 + 0j)
    with pytest.raises(SingularPointError):
        moebius(1, 0, 2, -1).eval(0.5 + 0j)


def test_hardy_constant():
    for p in (0.5, 1.0, 3.0):
        v, _ = hardy_norm(lambda z: np.full(np.shape(z), 2.5 + 0j), p, [0.3, 0.9])
        assert v == pytest.approx(2.5)


def test_hardy_identity_p2():
    r = np.array([0.5, 0.9, 0.99])
    v, means = hardy_norm(lambda z: z, 2, r)
    assert v == pytest.approx(0.99)
    assert np.allclose(means, r)


def test_hardy_phi_one_stable():
    f = phi_tau(1.0)
    # grid graded toward the boundary singularity at theta = 0
    u = np.linspace(-1, 1, 40001)
    th = np.pi * np.sign(u) * np.abs(u) ** 4
    v1, _ = hardy_norm(f.derivative, 1, [0.999], th)
    v2, _ = hardy_norm(f.derivative, 1, [0.9999], th)
    assert np.isfinite(v1) and abs(v2 / v1 - 1) < 0.01


def test_koebe_identity():
    D = make_disk()
    assert koebe_ratio(identity(), D, 0.5 + 0j) == pytest.approx(1.0)
    z = np.array([0.1, 0.5j, -0.9 + 0.01j])
    assert np.allclose(koebe_ratio(identity(), D, z), 1.0)
    with pytest.raises(ValueError):
        koebe_ratio(identity(), D, 1.0 + 0j)


def test_koebe_phi_one():
    Y = make_target_Ytau(1.0)
    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0, 0.98 ** 2, 1000))
    z = r * np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
    q = koebe_ratio(phi_tau(1.0), Y, z)
    assert np.all((q >= 0.25) & (q <= 4))


def test_parse_map():
    assert parse_map("phi_tau:0.5").params == (0.5,)
    assert parse_map("identity").kind == "identity"
    with pytest.raises(ValueError):
        parse_map("joukowski")


# -- properties ----------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0, 0.95), st.floats(0, 2 * np.pi))
def test_cauchy_riemann(tau, r, a):
    f = phi_tau(tau)
    z = r * np.exp(1j * a)
    h = 1e-5
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    # f_y = i f_x for a holomorphic map
    assert abs(fy - 1j * fx) < 1e-8 * max(1.0, abs(fx))
    assert abs(fx - f.derivative(z)) < 1e-6 * max(1.0, abs(fx))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.5, 3.0))
def test_hardy_monotone_in_radius(tau, p):
    f = phi_tau(tau)
    r = np.array([0.3, 0.6, 0.8, 0.9])
    _, means = hardy_norm(f.derivative, p, r)
    assert np.all(np.diff(means) >= -1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(-0.5, 0.5), st.floats(0, 0.999), st.floats(0, 2 * np.pi))
def test_koebe_bounds_automorphism(ax, ay, r, t):
    a = complex(ax, ay)
    g = disk_automorphism(a)
    z = r * np.exp(1j * t)
    q = koebe_ratio(g, make_disk(), z)
    assert 0.25 <= q <= 4
