"""Extensions of boundary maps into the domain: Poisson integrals on the disk,
discrete p-harmonic minimizers on triangle meshes, the composed extension
through a radial Lipschitz map, and a homeomorphy check for the result."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .boundary_maps import UNIT_CIRCLE, CircleMap, invert
from .geometry import TWO_PI, JordanCurve, JordanDomain, segment_crossings
from .mesh import Mesh

log = logging.getLogger(__name__)


class NonConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def trace_samples(psi, theta):
    """Values of a boundary trace: a CircleMap or any callable of the angle."""
    return np.asarray(psi(theta), complex)


def _quad_nodes(n):
    return TWO_PI * np.arange(n) / n


def _chunks(z, size):
    for lo in range(0, len(z), size):
        yield slice(lo, lo + size)


def poisson_extend(psi, z, n_quad=8192):
    """Harmonic extension of the trace psi into the open unit disk."""
    z = np.asarray(z, complex)
    flat = np.atleast_1d(z).ravel()
    if np.any(np.abs(flat) >= 1):
        raise ValueError("Poisson extension needs |z| < 1")
    t = _quad_nodes(n_quad)
    e = np.exp(1j * t)
    vals = trace_samples(psi, t)
    out = np.empty(flat.shape, complex)
    step = max(1, 2_000_000 // n_quad)
    for sl in _chunks(flat, step):
        zz = flat[sl, None]
        P = (1 - np.abs(zz) ** 2) / np.abs(e[None, :] - zz) ** 2
        out[sl] = P @ vals / n_quad
    return out.reshape(z.shape) if z.ndim else complex(out[0])


def poisson_derivative(psi, z, n_quad=8192):
    """(H_z, H_zbar) of the Poisson extension.

    Differentiating the kernel under the integral gives
    H_z = (1/2pi) int psi(t) e^{it} / (e^{it} - z)^2 dt and the conjugate
    formula for H_zbar; integrating by parts turns these into the contour
    integrals of psi' against 1/(e^{it} - z), but the form used here avoids
    differentiating a piecewise-linear trace.
    """
    z = np.asarray(z, complex)
    flat = np.atleast_1d(z).ravel()
    if np.any(np.abs(flat) >= 1):
        raise ValueError("Poisson derivative needs |z| < 1")
    t = _quad_nodes(n_quad)
    e = np.exp(1j * t)
    vals = trace_samples(psi, t)
    hz = np.empty(flat.shape, complex)
    hzb = np.empty(flat.shape, complex)
    step = max(1, 2_000_000 // n_quad)
    for sl in _chunks(flat, step):
        zz = flat[sl, None]
        hz[sl] = (e[None, :] / (e[None, :] - zz) ** 2) @ vals / n_quad
        ec = np.conj(e)[None, :]
        hzb[sl] = (ec / (ec - np.conj(zz)) ** 2) @ vals / n_quad
    if z.ndim == 0:
        return complex(hz[0]), complex(hzb[0])
    return hz.reshape(z.shape), hzb.reshape(z.shape)


@dataclass(eq=False)
class MeshField:
    mesh: Mesh
    values: np.ndarray
    boundary_trace: object = None
    info: dict = field(default_factory=dict)

    @cached_property
    def gradients(self):
        """Per element (u_x, u_y, v_x, v_y), shape (m, 4)."""
        G = self.mesh.basis_gradients
        f = self.values[self.mesh.triangles]
        gu = np.sum(f.real * G, axis=1)
        gv = np.sum(f.imag * G, axis=1)
        return np.c_[gu.real, gu.imag, gv.real, gv.imag]

    @cached_property
    def jacobian(self):
        g = self.gradients
        return g[:, 0] * g[:, 3] - g[:, 1] * g[:, 2]

    @cached_property
    def frobenius(self):
        return np.sqrt(np.sum(self.gradients ** 2, axis=1))

    def trace_error(self):
        b = self.mesh.boundary
        return float(np.max(np.abs(self.values[b] - boundary_values(self.boundary_trace, self.mesh)[b])))

    def to_csv(self):
        lines = ["node_id,x,y,u,v"]
        for i, (z, w) in enumerate(zip(self.mesh.nodes, self.values)):
            lines.append(f"{i},{z.real:.17g},{z.imag:.17g},{w.real:.17g},{w.imag:.17g}")
        return "\n".join(lines) + "\n"

    def elements_csv(self):
        lines = ["element_id,n0,n1,n2,u_x,u_y,v_x,v_y"]
        for k, (t, g) in enumerate(zip(self.mesh.triangles, self.gradients)):
            lines.append(f"{k},{t[0]},{t[1]},{t[2]}," + ",".join(f"{x:.17g}" for x in g))
        return "\n".join(lines) + "\n"


def boundary_values(trace, mesh: Mesh):
    """Trace values at every node (only boundary entries are meaningful)."""
    out = np.zeros(mesh.n_nodes, complex)
    b = mesh.boundary
    z = mesh.nodes[b]
    if isinstance(trace, CircleMap):
        out[b] = trace.at_points(z)
    elif callable(trace):
        if mesh.kind == "disk":
            c = mesh.meta.get("center", 0j)
            out[b] = trace_samples(trace, np.angle(z - c))
        else:
            out[b] = trace(z)
    else:
        raise TypeError("trace must be a CircleMap or a callable")
    return out


# -- p-harmonic solver ---------------------------------------------------------


def _energy_parts(mesh, u, p, mu):
    G = np.sum(u[mesh.triangles] * mesh.basis_gradients, axis=1)
    q = np.abs(G) ** 2 + mu * mu
    return G, q


def _energy(mesh, u, p, mu):
    _, q = _energy_parts(mesh, u, p, mu)
    return float(np.sum(mesh.areas * q ** (p / 2)))


def _assemble(mesh, u, p, mu):
    G, q = _energy_parts(mesh, u, p, mu)
    A = mesh.areas
    B = mesh.basis_gradients
    w = A * p * q ** (p / 2 - 1) if p != 2 else 2 * A
    # gradient: w * <G, grad lambda_i>
    gi = (np.conj(G)[:, None] * B).real
    grad = np.zeros(mesh.n_nodes)
    np.add.at(grad, mesh.triangles.ravel(), (w[:, None] * gi).ravel())
    BB = (B[:, :, None] * np.conj(B[:, None, :])).real
    H = w[:, None, None] * BB
    if p != 2:
        H += (w * (p - 2) / q)[:, None, None] * gi[:, :, None] * gi[:, None, :]
    r = np.repeat(mesh.triangles, 3, axis=1).ravel()
    c = np.tile(mesh.triangles, (1, 3)).ravel()
    K = sp.coo_matrix((H.ravel(), (r, c)), shape=(mesh.n_nodes,) * 2).tocsr()
    return grad, K


def _solve_scalar(mesh, u0, free, p, tol, max_iter, history, mu_final=1e-8):
    u = u0.copy()
    fixed_energy_scale = max(_energy(mesh, u, p, 0.0), 1e-300)
    if p == 2:
        mus = [0.0]
    else:
        G, _ = _energy_parts(mesh, u, p, 0.0)
        mu0 = 0.1 * max(np.median(np.abs(G)), 1e-12)
        mus = list(np.geomspace(mu0, mu_final, max(2, int(np.ceil(np.log10(mu0 / mu_final))) + 1))) if mu0 > mu_final else [mu_final]
    iters = 0
    res = np.inf
    for mu in mus:
        E = _energy(mesh, u, p, mu)
        history.append(E)
        for _ in range(max_iter):
            grad, K = _assemble(mesh, u, p, mu)
            g = grad[free]
            Kf = K[free][:, free]
            d = np.sqrt(np.maximum(Kf.diagonal(), 1e-300))
            Ds = sp.diags(1.0 / d)
            step = -(Ds @ spla.spsolve((Ds @ Kf @ Ds).tocsc(), Ds @ g))
            dec = float(-g @ step)
            res = dec / fixed_energy_scale
            if res <= tol:
                break
            a = 1.0
            while True:
                un = u.copy()
                un[free] += a * step
                En = _energy(mesh, un, p, mu)
                if En <= E - 1e-4 * a * dec or a < 1e-10:
                    break
                a *= 0.5
            if En > E:
                break
            u, E = un, En
            history.append(E)
            iters += 1
        else:
            raise NonConvergenceError(f"Newton did not converge at mu={mu:.1e}", res)
    return u, iters, res


def p_harmonic_extend(trace, mesh: Mesh, p: float, tol=1e-12, max_iter=60, initial=None) -> MeshField:
    """Coordinatewise discrete minimizer of sum area * |grad u|^p with the
    trace as Dirichlet data; the energy is regularized by mu^2 with mu driven
    down to 1e-8."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    bvals = boundary_values(trace, mesh)
    bnd = mesh.is_boundary
    free = np.flatnonzero(~bnd)
    out = np.zeros(mesh.n_nodes, complex)
    info = {"p": p, "iterations": 0, "residual": 0.0, "energy_history": {}}
    for name, part in (("u", np.real), ("v", np.imag)):
        if initial is None:
            u0 = np.where(bnd, part(bvals), 0.0)
            if p != 2:
                hist = []
                u0, _, _ = _solve_scalar(mesh, u0, free, 2.0, tol, max_iter, hist)
        else:
            u0 = np.where(bnd, part(bvals), part(initial))
        hist = []
        u, it, res = _solve_scalar(mesh, u0, free, float(p), tol, max_iter, hist)
        info["iterations"] += it
        info["residual"] = max(info["residual"], res)
        info["energy_history"][name] = hist
        out += u if name == "u" else 1j * u
    return MeshField(mesh, out, trace, info)


def harmonic_extend(trace, mesh: Mesh, n_quad=None) -> MeshField:
    """Poisson extension at the interior nodes of a disk mesh; the boundary
    nodes carry the trace itself."""
    if mesh.kind != "disk":
        return p_harmonic_extend(trace, mesh, 2.0)
    c = mesh.meta.get("center", 0j)
    R = mesh.meta.get("radius", 1.0)
    w = (mesh.nodes - c) / R
    interior = ~mesh.is_boundary
    rmax = np.max(np.abs(w[interior])) if interior.any() else 0.0
    nb = len(mesh.boundary)
    n = n_quad or int(max(4 * nb, 8 * TWO_PI / max(1 - rmax, 1e-6), 1024))
    vals = boundary_values(trace, mesh)
    if isinstance(trace, CircleMap):
        # angle on the source circle, which is where the trace is parametrized
        psi = lambda th: trace.evaluate(th - np.angle(trace.source.vertices[0] - (trace.source.circle or (0j,))[0]))
        psi = trace.evaluate if trace.source.circle is not None else psi
    else:
        psi = trace
    vals[interior] = poisson_extend(psi, w[interior], n)
    return MeshField(mesh, vals, trace, {"p": 2.0, "quadrature": n})


# -- composed extension ------------------------------------------------------------


class LipschitzTargetMap:
    """Radial extension G(r e^{ia}) = c + r (gamma(a) - c) of the constant-speed
    parametrization gamma of a target curve star-shaped about c."""

    def __init__(self, target: JordanCurve, center):
        self.target = target
        self.center = complex(center)
        v = target.vertices - self.center
        if np.any(np.abs(v) == 0):
            raise ValueError("center lies on the target boundary")
        step = np.angle(v[1:] / v[:-1])
        if np.any(step <= 0) or abs(step.sum() - TWO_PI) > 1e-8:
            raise ValueError("target is not star-shaped with respect to the center")
        R = np.abs(v).max()
        self.lipschitz_bound = float(np.hypot(R, target.length / TWO_PI))

    def eval(self, w):
        w = np.asarray(w, complex)
        return self.center + np.abs(w) * (self.target.param(np.angle(w)) - self.center)

    __call__ = eval


def composed_extension(phi: CircleMap, mesh: Mesh, center=None, method="harmonic", p=2.0,
                       split_kinks=False) -> MeshField:
    """h = G o h0 with h0 the extension of phi0 (phi with the unit circle as target).

    G is only piecewise smooth across the rays to the target corners; with
    split_kinks the mesh is first refined along their preimages under h0 so
    that the piecewise-linear interpolant of h stays orientation preserving.
    """
    target = phi.target
    if not target.rectifiable:
        raise ValueError("target boundary must be rectifiable")
    left = None
    if split_kinks and target.circle is None:
        if method != "harmonic":
            raise ValueError("kink splitting follows the harmonic h0 only")
        mesh, left = split_along_kinks(phi, mesh)
    phi0 = phi.with_target(UNIT_CIRCLE)
    if method == "harmonic":
        h0 = harmonic_extend(phi0, mesh)
    else:
        h0 = p_harmonic_extend(phi0, mesh, p)
    if target.circle is not None:
        c, r = target.circle
        vals = c + r * h0.values
        G = None
    else:
        if center is None:
            center = target.vertices[:-1].mean()
        G = LipschitzTargetMap(target, center)
        vals = G(h0.values)
    b = mesh.boundary
    vals[b] = boundary_values(phi, mesh)[b]
    info = dict(h0.info)
    info["lipschitz_bound"] = None if G is None else G.lipschitz_bound
    if left is not None:
        info["kink_edges_left"] = left
    return MeshField(mesh, vals, phi, info)


def homeomorphy_check(field: MeshField) -> dict:
    J = field.jacobian
    e = field.mesh.edges
    w = field.values
    crossings = segment_crossings(w[e[:, 0]], w[e[:, 1]], ends=e)
    return {"jacobian_sign_fraction": float(np.mean(J > 0)), "injectivity_violations": int(len(crossings)),
            "n_elements": int(len(J))}


# -- kink-conforming refinement ------------------------------------------------


def _wrap(a):
    return np.angle(np.exp(1j * a))


def kink_angles(target: JordanCurve, tol=0.05):
    """Parameter angles of the corners of a polygonal target, where the
    radial map G has a crease."""
    v = target.vertices
    d = np.diff(v)
    turn = np.angle(d / np.roll(d, 1))
    corner = np.abs(turn) > tol
    return TWO_PI * target.cumulative_arclength[:-1][corner] / target.length


def _bisect_crossings(h0, a, b, sa, s, iters=40):
    """Parameter t in (0, 1) where the image of the segment a->b under h0
    crosses the ray of angle s; sa is the side of the ray the image of a
    lies on."""
    side = lambda z: np.sign(_wrap(np.angle(h0(z)) - s))
    lo = np.zeros(len(a))
    hi = np.ones(len(a))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        same = side(a + mid * (b - a)) == sa
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def split_along_kinks(phi: CircleMap, mesh: Mesh, angles=None, snap=0.15):
    """Refine a unit-disk mesh so that no element straddles the preimage,
    under the harmonic extension h0 of phi0, of a crease ray of G.

    The preimage of the ray of angle s runs from h0^{-1}(0) to the boundary
    point where phi0 takes angle s. Nodes are added at both ends and where
    the curve crosses element edges; crossings close to an existing node
    snap to it. Returns (mesh, number of edges still crossing a ray).
    """
    if mesh.kind != "disk" or mesh.meta.get("center", 0j) != 0 or mesh.meta.get("radius", 1.0) != 1.0:
        raise ValueError("kink splitting needs the unit disk mesh")
    angles = kink_angles(phi.target) if angles is None else np.asarray(angles, float)
    phi0 = phi.with_target(UNIT_CIRCLE)
    h0 = _HarmonicSeries(phi0.evaluate)
    nodes = list(mesh.nodes)
    tris = [list(t) for t in mesh.triangles]
    h = np.sqrt(2 * np.median(mesh.areas))

    # corners on the boundary: slide a nearby boundary node onto the corner
    # preimage, else fold the owning element into a quad split at a new node
    used = set()
    for th in np.mod(invert(phi).angle(angles), TWO_PI):
        cur = Mesh(np.array(nodes), np.array(tris), "disk", {})
        bd = cur.boundary
        bang = np.mod(np.angle(cur.nodes[bd]), TWO_PI)
        gap = np.abs(_wrap(bang - th))
        i = int(bd[np.argmin(gap)])
        if gap.min() < 1e-12 or (gap.min() < snap * h and i not in used):
            nodes[i] = np.exp(1j * th)
            used.add(i)
            continue
        j = int(np.argmin(np.mod(th - bang, TWO_PI)))
        a, b = bd[j], bd[(j + 1) % len(bd)]
        k = next(i for i, t in enumerate(cur.triangles) if a in t and b in t)
        c = next(v for v in tris[k] if v not in (a, b))
        q = len(nodes)
        nodes.append(np.exp(1j * th))
        used.add(q)
        tris[k] = [a, q, c]
        tris.append([q, b, c])

    # the common end: insert h0^{-1}(0) inside the element whose image holds 0
    nodes = np.array(nodes)
    w = _h0_nodes(h0, nodes, tris)
    tri = np.array(tris)
    z = _preimage_of_zero(h0, nodes, tri, w)
    if z is not None:
        l1, l2 = _barycentric(nodes[tri], z)
        k = int(np.argmax(np.minimum(np.minimum(l1, l2), 1 - l1 - l2)))
        v = tri[k]
        near = int(v[np.argmin(np.abs(nodes[v] - z))])
        if abs(nodes[near] - z) < snap * h:
            nodes[near] = z
            w[near] = 0j
        else:
            q = len(nodes)
            nodes = np.r_[nodes, z]
            a, b, c = v
            tri = np.r_[np.delete(tri, k, 0), [[a, b, q], [b, c, q], [c, a, q]]]
            w = np.r_[w, 0j]

    for s in angles:
        nodes, tri, w = _split_one_ray(h0, nodes, tri, w, s, snap)
    out = Mesh(nodes, tri, "disk", dict(mesh.meta))
    wf = _h0_nodes(h0, out.nodes, out.triangles)
    left = sum(len(_crossing_edges(out.triangles, wf, s)) for s in angles)
    return out, left


def _h0_nodes(h0, nodes, tris):
    tmp = Mesh(nodes, np.asarray(tris), "disk", {})
    w = np.empty(len(nodes), complex)
    bd = tmp.is_boundary
    w[bd] = trace_samples(h0.psi, np.angle(nodes[bd]))
    w[~bd] = h0(nodes[~bd])
    return w


class _HarmonicSeries:
    """Harmonic extension of a circle trace as sum c_k z^k + c_-k conj(z)^k,
    with the coefficients from one FFT of the samples."""

    def __init__(self, psi, n=1 << 19, max_terms=1 << 16):
        self.psi = psi
        c = np.fft.fft(trace_samples(psi, _quad_nodes(n))) / n
        self.pos = c[:max_terms]
        self.neg = c[:-max_terms - 1:-1]

    def _terms(self, z):
        r = np.max(np.abs(z)) if len(z) else 0.0
        if r >= 1:
            return len(self.neg)
        return int(min(len(self.neg), np.ceil(np.log(1e-15) / np.log(max(r, 1e-3))) + 2))

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, complex))
        out = np.empty(z.shape, complex)
        # points far from the circle need few terms: group by a power of two
        need = np.log(1e-15) / np.log(np.clip(np.abs(z), 1e-3, 1 - 1e-12))
        grp = np.ceil(np.log2(np.minimum(need + 2, len(self.neg))))
        for g in np.unique(grp):
            sel = grp == g
            K = int(min(2 ** g, len(self.neg)))
            idx = np.flatnonzero(sel)
            for sl in _chunks(idx, max(1, 4_000_000 // K)):
                zz = z[idx[sl], None]
                P = np.cumprod(np.c_[np.ones(len(zz)), np.repeat(zz, K - 1, axis=1)], axis=1)
                out[idx[sl]] = P @ self.pos[:K] + np.conj(P[:, 1:]) @ self.neg[:K - 1]
        return out

    def derivatives(self, z):
        """(h_z, h_zbar) at one point."""
        z = complex(z)
        K = self._terms(np.array([z]))
        k = np.arange(1, K)
        zk = z ** (k - 1)
        return complex(np.sum(k * self.pos[1:K] * zk)), complex(np.sum(k * self.neg[:K - 1] * np.conj(zk)))


def _barycentric(p, x):
    """Coordinates (l1, l2) of x in the triangles p (m, 3)."""
    b, c = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    det = (b.conj() * c).imag
    y = x - p[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        return (y.conj() * c).imag / det, (b.conj() * y).imag / det


def _preimage_of_zero(h0, nodes, tri, w):
    """Newton solve of h0(z) = 0, started from the element whose image holds 0."""
    l1, l2 = _barycentric(w[tri], 0j)
    hit = np.flatnonzero((l1 >= 0) & (l2 >= 0) & (l1 + l2 <= 1))
    if not len(hit):
        return None
    k = int(hit[0])
    v = nodes[tri[k]]
    z = v[0] + l1[k] * (v[1] - v[0]) + l2[k] * (v[2] - v[0])
    for _ in range(30):
        f = complex(h0(z)[0])
        hz, hzb = h0.derivatives(z)
        # solve hz dz + hzb conj(dz) = -f
        dz = (-f * np.conj(hz) + np.conj(f) * hzb) / (abs(hz) ** 2 - abs(hzb) ** 2)
        z = z + dz
        if abs(dz) < 1e-14:
            break
    return complex(z)


def _side(w, s, tol=1e-8):
    d = _wrap(np.angle(w) - s)
    return np.where((np.abs(d) < tol) | (np.abs(w) < tol), 0, np.sign(d)), d


def _crossing_edges(tri, w, s):
    side, d = _side(w, s)
    e = np.unique(np.sort(np.r_[tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]], axis=1), axis=0)
    cross = (side[e[:, 0]] * side[e[:, 1]] < 0) & (np.abs(d[e[:, 0]]) + np.abs(d[e[:, 1]]) < np.pi)
    return e[cross]


def _locate_crossings(h0, nodes, w, e, s):
    sa = _side(w[e[:, 0]], s)[0]
    return _bisect_crossings(h0, nodes[e[:, 0]], nodes[e[:, 1]], sa, s)


def _split_one_ray(h0, nodes, tri, w, s, snap):
    bd = Mesh(nodes, tri, "disk", {}).is_boundary
    nodes, w = nodes.copy(), w.copy()
    fixed = bd.copy()
    for _ in range(20):
        e = _crossing_edges(tri, w, s)
        if not len(e):
            return nodes, tri, w
        t = _locate_crossings(h0, nodes, w, e, s)
        # a crossing close to a free node drags that node onto the curve
        near_a = (t < snap) & ~fixed[e[:, 0]]
        near_b = (t > 1 - snap) & ~fixed[e[:, 1]] & ~near_a
        if not (near_a.any() or near_b.any()):
            break
        seen = set()
        for k in np.flatnonzero(near_a | near_b):
            v = int(e[k, 0] if near_a[k] else e[k, 1])
            if v in seen:
                continue
            seen.add(v)
            a, b = nodes[e[k, 0]], nodes[e[k, 1]]
            nodes[v] = a + t[k] * (b - a)
            fixed[v] = True
        moved = np.array(sorted(seen))
        w[moved] = h0(nodes[moved])
        w[moved] = np.abs(w[moved]) * np.exp(1j * s)
    a, b = nodes[e[:, 0]], nodes[e[:, 1]]
    p = a + t * (b - a)
    new = len(nodes) + np.arange(len(e))
    nodes = np.r_[nodes, p]
    w = np.r_[w, h0(p)]
    w[new] = np.abs(w[new]) * np.exp(1j * s)
    mid = {(int(x), int(y)): int(n) for (x, y), n in zip(e, new)}
    mid.update({(y, x): n for (x, y), n in list(mid.items())})
    out = []
    for t3 in tri.tolist():
        cut = [(i, mid[(t3[i], t3[(i + 1) % 3])]) for i in range(3) if (t3[i], t3[(i + 1) % 3]) in mid]
        if len(cut) == 1:
            i, q = cut[0]
            a, b, c = t3[i], t3[(i + 1) % 3], t3[(i + 2) % 3]
            out += [[a, q, c], [q, b, c]]
        elif len(cut) == 2:
            # the shared vertex of the two cut edges is cut off alone
            (i, p1), (j, p2) = cut
            if (i + 1) % 3 != j:
                (i, p1), (j, p2) = (j, p2), (i, p1)
            a, v, c = t3[i], t3[j], t3[(j + 1) % 3]
            # p1 on a-v, p2 on v-c
            out.append([p1, v, p2])
            if abs(nodes[p1] - nodes[c]) < abs(nodes[p2] - nodes[a]):
                out += [[a, p1, c], [p1, p2, c]]
            else:
                out += [[a, p1, p2], [a, p2, c]]
        else:
            out.append(t3)
    return nodes, np.array(out), w
