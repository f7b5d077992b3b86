import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from sobex.boundary_maps import UNIT_CIRCLE, cusp_boundary_map, identity_map, knot_map, random_monotone_map
from sobex.extension import (LipschitzTargetMap, MeshField, NonConvergenceError, _energy, composed_extension,
                             harmonic_extend, homeomorphy_check, kink_angles, p_harmonic_extend,
                             poisson_derivative, poisson_extend, split_along_kinks)
from sobex.geometry import make_cusp_domain, make_polygon, make_regular_polygon
from sobex.mesh import cusp_mesh, disk_mesh

TWO_PI = 2 * np.pi


def disk_points(n, rmax=0.95, seed=0):
    rng = np.random.default_rng(seed)
    r = rmax * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(1j * rng.uniform(0, TWO_PI, n))


def test_poisson_identity():
    z = disk_points(1000)
    assert np.max(np.abs(poisson_extend(lambda t: np.exp(1j * t), z) - z)) < 1e-6


def test_poisson_cube():
    z = disk_points(500)
    assert np.max(np.abs(poisson_extend(lambda t: np.exp(3j * t), z) - z ** 3)) < 1e-6


def test_poisson_rejects_boundary():
    with pytest.raises(ValueError):
        poisson_extend(lambda t: np.exp(1j * t), 1.0 + 0j)
    with pytest.raises(ValueError):
        poisson_derivative(lambda t: np.exp(1j * t), np.array([0.5, 1.2j]))


def test_derivative_holomorphic_and_anti():
    z = disk_points(50, 0.9)
    hz, hzb = poisson_derivative(lambda t: np.exp(1j * t), z)
    assert np.allclose(hz, 1) and np.allclose(hzb, 0, atol=1e-9)
    hz, hzb = poisson_derivative(lambda t: np.exp(-1j * t), z)
    assert np.allclose(hz, 0, atol=1e-9) and np.allclose(hzb, 1)


def _fd_wirtinger(psi, z, h=1e-5):
    fx = (poisson_extend(psi, z + h) - poisson_extend(psi, z - h)) / (2 * h)
    fy = (poisson_extend(psi, z + 1j * h) - poisson_extend(psi, z - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def test_derivative_random_trace_point():
    psi = random_monotone_map(np.random.default_rng(2))
    z = 0.3 + 0.2j
    hz, hzb = poisson_derivative(psi, z)
    fz, fzb = _fd_wirtinger(psi, z)
    assert abs(hz - fz) < 1e-4 * abs(fz)
    assert abs(hzb - fzb) < 1e-4 * max(abs(fzb), 1e-3 * abs(fz))


def test_p2_identity_on_disk_mesh():
    m = disk_mesh(5)
    for f in (harmonic_extend(identity_map(), m), p_harmonic_extend(identity_map(), m, 2.0)):
        assert np.max(np.abs(f.values - m.nodes)) < 1e-6


def test_p15_identity_on_disk_mesh():
    m = disk_mesh(4)
    f = p_harmonic_extend(identity_map(), m, 1.5)
    assert np.max(np.abs(f.values - m.nodes)) < 1e-6


def test_nonconvergence_carries_residual():
    m = disk_mesh(4)
    with pytest.raises(NonConvergenceError) as e:
        p_harmonic_extend(random_monotone_map(np.random.default_rng(0)), m, 3.0, max_iter=1)
    assert e.value.residual > 0


def test_p_must_exceed_one():
    with pytest.raises(ValueError):
        p_harmonic_extend(identity_map(), disk_mesh(2), 1.0)


def test_cross_check_against_lbfgs():
    """Newton minimizer against an independent L-BFGS run from a different start."""
    p = 1.5
    X = make_cusp_domain(0.5)
    phi = cusp_boundary_map(X, p, N=30)
    m = cusp_mesh(0.5, 2)
    f = p_harmonic_extend(phi, m, p)
    free = np.flatnonzero(~m.is_boundary)
    mu = 1e-8
    B = m.basis_gradients
    A = m.areas
    total_newton = 0.0
    total_lbfgs = 0.0
    for part in (np.real, np.imag):
        u = part(f.values).copy()
        total_newton += _energy(m, u, p, mu)
        base = u.copy()
        base[free] = 0.3  # a different initialization

        def fun(x):
            w = base.copy()
            w[free] = x
            G = np.sum(w[m.triangles] * B, axis=1)
            q = np.abs(G) ** 2 + mu * mu
            E = np.sum(A * q ** (p / 2))
            coef = A * p * q ** (p / 2 - 1)
            gi = (np.conj(G)[:, None] * B).real * coef[:, None]
            grad = np.zeros(m.n_nodes)
            np.add.at(grad, m.triangles.ravel(), gi.ravel())
            return E, grad[free]

        res = minimize(fun, base[free], jac=True, method="L-BFGS-B",
                       options={"maxiter": 20000, "ftol": 1e-15, "gtol": 1e-11, "maxcor": 30})
        total_lbfgs += res.fun
    assert abs(total_lbfgs - total_newton) < 1e-4 * total_newton
    assert total_newton <= total_lbfgs * (1 + 1e-12)


def test_energy_decreases_per_iteration():
    # accepted Newton steps lower the energy and lowering the regularization
    # lowers it further, so the whole record is nonincreasing
    m = disk_mesh(4)
    for p in (1.5, 3.0):
        f = p_harmonic_extend(random_monotone_map(np.random.default_rng(9)), m, p)
        for hist in f.info["energy_history"].values():
            h = np.asarray(hist)
            assert len(h) > 2 and np.all(np.diff(h) <= 0)


def test_composed_disk_identity():
    m = disk_mesh(4)
    phi = random_monotone_map(np.random.default_rng(4))
    h = composed_extension(phi, m)
    ref = harmonic_extend(phi, m)
    assert np.max(np.abs(h.values - ref.values)) < 1e-12


def test_composed_pentagon_trace():
    Y = make_regular_polygon(5)
    phi = identity_map().with_target(Y.boundary)
    m = disk_mesh(6)
    from sobex.extension import harmonic_extend as he
    h0 = he(phi.with_target(UNIT_CIRCLE), m)
    G = LipschitzTargetMap(Y.boundary, 0j)
    b = m.boundary
    err = np.max(np.abs(G(h0.values[b]) - phi.at_points(m.nodes[b])))
    assert err < 1e-4 * Y.diameter()
    assert len(b) >= 192


def test_star_shape_required():
    L = make_polygon([0, 2, 2 + 1j, 1 + 1j, 1 + 2j, 2j])
    with pytest.raises(ValueError):
        LipschitzTargetMap(L.boundary, 1.9 + 1.9j)


def test_homeomorphy_identity_and_square():
    m = disk_mesh(4)
    rep = homeomorphy_check(MeshField(m, m.nodes.copy()))
    assert rep["jacobian_sign_fraction"] == 1.0 and rep["injectivity_violations"] == 0
    rep = homeomorphy_check(MeshField(m, m.nodes ** 2))
    assert rep["injectivity_violations"] > 0


def test_l_shaped_target_folds():
    # harmonic extension onto a nonconvex L with the trace squeezed near the notch
    L = make_polygon([0, 2, 2 + 1j, 1 + 1j, 1 + 2j, 2j])
    v = L.boundary.vertices
    s = L.boundary.locate(v[:-1])
    knots = np.c_[TWO_PI * np.array([0, 0.1, 0.2, 0.45, 0.55, 0.8, 1.0]),
                  TWO_PI * np.r_[s[[0, 1, 2]], s[3] - 0.01, s[3] + 0.01, s[5], L.boundary.length] / L.boundary.length]
    phi = knot_map(knots, UNIT_CIRCLE, L.boundary)
    m = disk_mesh(5)
    f = harmonic_extend(phi, m)
    rep = homeomorphy_check(f)
    assert rep["jacobian_sign_fraction"] < 1.0


def test_composed_refinement_reduces_trace_error():
    # smooth star-shaped target, so the chord error is governed by the mesh size
    a = TWO_PI * np.arange(2048) / 2048
    Y = make_polygon(1.5 * np.cos(a) + 1j * np.sin(a))
    phi = identity_map().with_target(Y.boundary)
    errs = []
    for level in (4, 5, 6):
        m = disk_mesh(level)
        h = composed_extension(phi, m)
        b = m.boundary
        mid = 0.5 * (h.values[b] + h.values[np.roll(b, -1)])
        zmid = 0.5 * (m.nodes[b] + m.nodes[np.roll(b, -1)])
        errs.append(np.max(np.abs(mid - phi(np.angle(zmid)))))
    assert errs[0] / errs[1] >= 1.5 and errs[1] / errs[2] >= 1.5


def test_kink_angles_of_pentagon():
    Y = make_regular_polygon(5)
    assert np.allclose(kink_angles(Y.boundary), TWO_PI * np.arange(5) / 5)
    a = TWO_PI * np.arange(512) / 512
    assert len(kink_angles(make_polygon(np.exp(1j * a)).boundary)) == 0


def test_split_along_kinks_puts_new_nodes_on_the_rays():
    Y = make_regular_polygon(5)
    phi = random_monotone_map(np.random.default_rng(0)).with_target(Y.boundary)
    base = disk_mesh(5)
    m, _ = split_along_kinks(phi, base)
    assert m.n_nodes > base.n_nodes
    # refinement covers the disk once: element areas add up to the boundary polygon
    z = m.nodes[m.boundary]
    assert np.sum(m.areas) == pytest.approx(0.5 * np.sum((np.conj(z) * np.roll(z, -1)).imag), rel=1e-12)
    # new nodes sit on h0-preimages of the crease rays; h0 by fine Poisson quadrature
    phi0 = phi.with_target(UNIT_CIRCLE)
    rays = np.exp(1j * kink_angles(Y.boundary))
    moved = np.min(np.abs(m.nodes[:, None] - base.nodes[None, :]), axis=1) > 1e-12
    inner = np.flatnonzero(moved & ~m.is_boundary)
    w = poisson_extend(phi0.evaluate, m.nodes[inner], 1 << 20)[:, None] * np.conj(rays)[None, :]
    dist = np.where(w.real > 0, np.abs(w.imag), np.abs(w))
    assert len(inner) > 20 and np.max(np.min(dist, axis=1)) < 1e-6
    # and the crease rays leave the disk exactly at boundary nodes
    ends = np.angle(phi0.at_points(m.nodes[moved & m.is_boundary]))
    assert np.allclose(np.sort(np.mod(ends + 1e-9, TWO_PI)), np.sort(kink_angles(Y.boundary)) + 1e-9, atol=1e-9)


def test_split_kinks_removes_folds_on_pentagon():
    Y = make_regular_polygon(5)
    m = disk_mesh(5)
    phi = random_monotone_map(np.random.default_rng(0)).with_target(Y.boundary)
    plain = homeomorphy_check(composed_extension(phi, m))
    split = homeomorphy_check(composed_extension(phi, m, split_kinks=True))
    assert plain["jacobian_sign_fraction"] < 1.0
    assert split["jacobian_sign_fraction"] == 1.0 and split["injectivity_violations"] == 0
    with pytest.raises(ValueError):
        composed_extension(phi, m, method="pharmonic", p=1.5, split_kinks=True)


# -- properties ----------------------------------------------------------------


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_mean_value_property(seed):
    psi = random_monotone_map(np.random.default_rng(seed))
    n = 8192
    t = TWO_PI * np.arange(n) / n
    assert abs(poisson_extend(psi, 0j, n) - np.mean(psi(t))) < 1e-9


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_discrete_maximum_principle(seed):
    m = disk_mesh(4)
    f = p_harmonic_extend(random_monotone_map(np.random.default_rng(seed)), m, 2.0)
    b = f.values[m.boundary]
    for part in (np.real, np.imag):
        v = part(f.values)
        assert np.all(v >= part(b).min() - 1e-12) and np.all(v <= part(b).max() + 1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_derivative_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    psi = random_monotone_map(rng)
    z = disk_points(10, 0.9, seed)
    hz, hzb = poisson_derivative(psi, z)
    fz, fzb = _fd_wirtinger(psi, z)
    scale = np.abs(fz) + np.abs(fzb)
    assert np.all(np.abs(hz - fz) < 1e-4 * scale)
    assert np.all(np.abs(hzb - fzb) < 1e-4 * scale)
