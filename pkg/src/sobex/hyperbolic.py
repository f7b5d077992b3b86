"""Quasihyperbolic distances from weighted lattice graphs, the disk hyperbolic
distance, growth-exponent fits toward boundary points, and the
modulus-of-continuity integral."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .energy import EnergyReport
from .geometry import segment_distance

# half of the 16-neighbourhood; the other half are the negatives
OFFSETS = np.array([(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)])
_SHIFT = 1 << 30


def _key(i, j):
    return (i.astype(np.int64) + _SHIFT) << 32 | (j.astype(np.int64) + _SHIFT)


def _unkey(k):
    return (k >> 32) - _SHIFT, (k & 0xFFFFFFFF) - _SHIFT


def _path_distance(z, path):
    if len(path) == 1:
        return np.abs(z - path[0])
    a, b = path[:-1], path[1:]
    out = np.full(z.shape, np.inf)
    for lo in range(0, len(z), 100_000):
        zz = z[lo:lo + 100_000, None]
        out[lo:lo + 100_000] = segment_distance(zz, a[None, :], b[None, :]).min(axis=1)
    return out


class QhGrid:
    """Lattice graph approximating the quasihyperbolic metric of a domain.

    Level 0 is the full lattice of spacing delta through x0, restricted to
    points with dist > delta/2. Level j > 0 has spacing delta/2^j and only
    covers the band dist < kappa * delta_{j-1}; when a path is given it is
    further limited to a corridor around that path. Levels share the nodes
    they have in common, so paths move freely between resolutions. Edges
    join 16-neighbours with weight length / dist(midpoint), and edges whose
    midpoint is closer to the boundary than half their length are dropped.
    """

    def __init__(self, domain, delta, x0, levels=0, path=None, kappa=6.0, corridor=(3.0, 4.0)):
        self.domain = domain
        self.delta = float(delta)
        self.x0 = complex(x0)
        self.levels = int(levels)
        if not domain.contains(self.x0):
            raise ValueError("anchor point is outside the domain")
        J = self.levels
        self.unit = self.delta / 2 ** J
        self._path = None if path is None else np.asarray(path, complex)
        self._kappa = kappa
        self._corridor = corridor
        sets = [self._level0()]
        for j in range(1, J + 1):
            sets.append(self._refine(j, sets[-1]))
        keys = np.unique(np.concatenate([s[0] for s in sets]))
        self.keys = keys
        i, k = _unkey(keys)
        self.nodes = self.x0 + self.unit * (i + 1j * k)
        self.node_dist = np.empty(len(keys))
        for s in sets:
            self.node_dist[np.searchsorted(keys, s[0])] = s[1]
        self.level_sizes = [len(s[0]) for s in sets]
        self.graph = self._edges(sets)
        self._tree = cKDTree(np.c_[self.nodes.real, self.nodes.imag])
        self._cache = {}
        self.source = self.snap(self.x0)

    def _accept(self, z, j, d=None):
        dom = self.domain
        ok = dom.contains(z)
        d = np.where(ok, dom.dist(z), 0.0) if d is None else d
        step = self.delta / 2 ** j
        ok &= d > step / 2
        if j > 0:
            ok &= d < self._kappa * 2 * step
            if self._path is not None:
                c1, c2 = self._corridor
                ok &= _path_distance(z, self._path) <= c1 * d + c2 * step
        return ok, d

    def _level0(self):
        x0, y0, x1, y1 = self.domain.bounding_box
        m = 2 ** self.levels
        i = np.arange(np.floor((x0 - self.x0.real) / self.delta), np.ceil((x1 - self.x0.real) / self.delta) + 1)
        k = np.arange(np.floor((y0 - self.x0.imag) / self.delta), np.ceil((y1 - self.x0.imag) / self.delta) + 1)
        I, K = np.meshgrid(i.astype(np.int64), k.astype(np.int64))
        I, K = I.ravel() * m, K.ravel() * m
        z = self.x0 + self.unit * (I + 1j * K)
        ok, d = self._accept(z, 0)
        return _key(I[ok], K[ok]), d[ok]

    def _refine(self, j, coarse):
        m = 2 ** (self.levels - j)
        keys, d = coarse
        o = np.argsort(keys)
        keys, d = keys[o], d[o]
        sel = d < self._kappa * self.delta / 2 ** (j - 1)
        seed, sd = keys[sel], d[sel]
        if self._path is not None and len(seed):
            i, k = _unkey(seed)
            ok, _ = self._accept(self.x0 + self.unit * (i + 1j * k), j, sd)
            seed, sd = seed[ok], sd[ok]
        visited = seed
        frontier = seed
        acc_keys = [seed]
        acc_d = [sd]
        nbr = np.array([(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)])
        while len(frontier):
            i, k = _unkey(frontier)
            ci = (i[:, None] + m * nbr[None, :, 0]).ravel()
            ck = (k[:, None] + m * nbr[None, :, 1]).ravel()
            cand = np.unique(_key(ci, ck))
            cand = cand[~np.isin(cand, visited, assume_unique=True)]
            if not len(cand):
                break
            visited = np.union1d(visited, cand)
            ci, ck = _unkey(cand)
            z = self.x0 + self.unit * (ci + 1j * ck)
            ok, dz = self._accept(z, j)
            frontier = cand[ok]
            acc_keys.append(frontier)
            acc_d.append(dz[ok])
        return np.concatenate(acc_keys), np.concatenate(acc_d)

    def _edges(self, sets):
        rows, cols, wts = [], [], []
        all_keys = self.keys
        for j, (keys, _) in enumerate(sets):
            m = 2 ** (self.levels - j)
            order = np.sort(keys)
            i, k = _unkey(order)
            for di, dk in OFFSETS:
                nk = _key(i + m * di, k + m * dk)
                pos = np.searchsorted(order, nk)
                pos = np.minimum(pos, len(order) - 1)
                hit = order[pos] == nk
                a = np.searchsorted(all_keys, order[hit])
                b = np.searchsorted(all_keys, nk[hit])
                length = self.unit * m * np.hypot(di, dk)
                mid = 0.5 * (self.nodes[a] + self.nodes[b])
                dm = self.domain.dist(mid)
                good = dm >= 0.5 * length
                rows.append(a[good])
                cols.append(b[good])
                wts.append(length / dm[good])
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        w = np.concatenate(wts)
        # identical node pairs can arise at two levels; keep the lighter edge
        key = r.astype(np.int64) * len(all_keys) + c
        order = np.lexsort((w, key))
        key, r, c, w = key[order], r[order], c[order], w[order]
        first = np.r_[True, key[1:] != key[:-1]]
        n = len(all_keys)
        return sp.coo_matrix((w[first], (r[first], c[first])), shape=(n, n)).tocsr()

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return self.graph.nnz

    def snap(self, x):
        x = complex(x)
        if not self.domain.contains(x):
            raise ValueError("point is outside the domain")
        return int(self._tree.query([x.real, x.imag])[1])

    def distances_from(self, node):
        if node not in self._cache:
            self._cache[node] = dijkstra(self.graph, directed=False, indices=node)
        return self._cache[node]

    def distance(self, x, y=None):
        """Quasihyperbolic distance between grid nodes nearest to x and y
        (y defaults to the anchor x0)."""
        a = self.snap(x)
        b = self.source if y is None else self.snap(y)
        return float(self.distances_from(b)[a])


def qh_distance(grid: QhGrid, x, y=None):
    return grid.distance(x, y)


def disk_hyperbolic(z):
    z = np.asarray(z, complex)
    if np.any(np.abs(z) >= 1):
        raise ValueError("point must lie in the open unit disk")
    out = np.log(1.0 / (1.0 - np.abs(z) ** 2))
    return float(out) if out.ndim == 0 else out


@dataclass
class GrowthFit:
    samples: list
    slope: float
    intercept: float
    r2: float
    loglog_slope: float = float("nan")
    method: str = "log-derivative"

    def to_dict(self):
        return {"schema_version": 1, "samples": [[float(h), float(d)] for h, d in self.samples],
                "slope": self.slope, "intercept": self.intercept, "r2": self.r2,
                "loglog_slope": self.loglog_slope, "method": self.method}


def _linfit(x, y):
    A = np.c_[x, np.ones_like(x)]
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1 - np.sum((y - pred) ** 2) / ss if ss > 0 else 1.0
    return float(coef[0]), float(coef[1]), float(r2)


def fit_growth(h, d):
    """Growth exponent from quasihyperbolic distances h at boundary distances d.

    If h ~ C d^{-a} + c then dh/dl ~ aC e^{al} with l = log(1/d), so the slope
    of log(dh/dl) against l estimates a without being biased by the additive
    constant c; plain log-log fits of h are reported alongside.
    """
    h = np.asarray(h, float)
    d = np.asarray(d, float)
    if len(h) < 4:
        raise ValueError("growth fit needs at least four samples")
    order = np.argsort(-d)
    h, d = h[order], d[order]
    ell = np.log(1.0 / d)
    dh = np.diff(h) / np.diff(ell)
    mid = 0.5 * (ell[1:] + ell[:-1])
    good = dh > 0
    if good.sum() < 3:
        raise ValueError("quasihyperbolic distance does not increase toward the boundary")
    slope, icpt, r2 = _linfit(mid[good], np.log(dh[good]))
    ll, _, _ = _linfit(ell, np.log(h))
    return GrowthFit(list(zip(h.tolist(), d.tolist())), slope, icpt, r2, ll)


def approach_path(domain, start, end, n=400):
    """Straight path from start toward the boundary point end."""
    t = np.linspace(0, 1, n, endpoint=False)
    return start + t * (end - start)


def growth_exponent(domain, x0, approach_samples, grid: QhGrid | None = None, delta=1 / 256,
                    levels=0, max_fraction=0.1, min_cells=4.0) -> GrowthFit:
    """Fit the growth exponent of h(x0, x) along the given approach samples.

    Only samples with dist < max_fraction * diam and at least min_cells
    finest grid spacings from the boundary enter the fit.
    """
    pts = np.asarray(approach_samples, complex)
    if len(pts) < 4:
        raise ValueError("growth fit needs at least four samples")
    if grid is None:
        grid = QhGrid(domain, delta, x0, levels=levels, path=np.r_[x0, pts])
    d = domain.dist(pts)
    finest = grid.delta / 2 ** grid.levels
    keep = (d < max_fraction * domain.diameter()) & (d >= min_cells * finest)
    pts, d = pts[keep], d[keep]
    if len(pts) < 4:
        raise ValueError("fewer than four usable samples")
    dist0 = grid.distances_from(grid.source)
    idx = grid._tree.query(np.c_[pts.real, pts.imag])[1]
    h = dist0[idx]
    dd = grid.node_dist[idx]
    return fit_growth(h, dd)


def cusp_approach(s, d_min=3e-4, d_max=0.25, n=24):
    """Centerline samples (0, y) of X_s whose boundary distance spans
    [d_min, d_max] geometrically; the distance is found on the polyline."""
    from .geometry import make_cusp_domain

    X = make_cusp_domain(s)
    y = np.geomspace(1e-4, 0.9, 4000)
    dy = X.dist(1j * y)
    targets = np.geomspace(d_max, d_min, n)
    ys = np.interp(targets, dy, y)
    return X, 1j * ys


# -- modulus of continuity --------------------------------------------------------------


def oscillation(g, z, t, n_dir=64, on_disk=False):
    """Oscillation of g over B(z, t), estimated on the circle |w - z| = t.

    For maps of the closed unit disk (on_disk=True) the ball is intersected
    with the disk, so its relative boundary also has an arc of the unit
    circle; both arcs are sampled.
    """
    beta = 2 * np.pi * np.arange(n_dir) / n_dir
    w = z + t * np.exp(1j * beta)
    if on_disk:
        w = w[np.abs(w) <= 1]
        if abs(abs(z) - 1) < t:
            # arc of the unit circle inside the ball
            half = 2 * np.arcsin(min(1.0, t / 2))
            a = np.angle(z) + half * np.linspace(-1, 1, n_dir)
            u = np.exp(1j * a)
            w = np.r_[w, u[np.abs(u - z) <= t]]
        if abs(z) <= 1:
            w = np.r_[w, z]
        vals = g.boundary_value(w) if hasattr(g, "boundary_value") else g(w)
    else:
        vals = np.asarray(g(w), complex)
    if len(vals) < 2:
        return 0.0
    return float(np.max(np.abs(vals[:, None] - vals[None, :])))


def moc_integral(g, z, r, delta_min, n_dir=64, per_octave=16, on_disk=None):
    """int_{delta_min}^{r} omega(t)^2 / t dt with log-spaced trapezoid nodes."""
    if on_disk is None:
        on_disk = hasattr(g, "boundary_value")
    n = max(2, int(np.ceil(per_octave * np.log2(r / delta_min))) + 1)
    u = np.linspace(np.log(delta_min), np.log(r), n)
    om = np.array([oscillation(g, z, np.exp(x), n_dir, on_disk) for x in u])
    return float(np.trapezoid(om ** 2, u)), om


def moc_report(g, z, r, delta0, halvings=8, **kw) -> EnergyReport:
    """moc_integral as delta_min is halved repeatedly.

    Increments D_k between consecutive cutoffs are fitted as D_k ~ l_k^-a with
    l_k = log(1/delta_k); the integral diverges as the cutoff goes to zero
    exactly when the increments are not summable, which this model puts at
    a <= 1. The flag uses that criterion; growth_rate stores a.
    """
    hist = []
    for k in range(halvings + 1):
        dm = delta0 / 2 ** k
        hist.append((dm, moc_integral(g, z, r, dm, **kw)[0]))
    vals = np.array([v for _, v in hist])
    inc = np.diff(vals)
    ell = np.log(1.0 / np.array([d for d, _ in hist[1:]]))
    if np.all(inc > 0):
        a = -_linfit(np.log(ell), np.log(inc))[0]
    else:
        a = float("inf")
    return EnergyReport(float(vals[-1]), 2.0, hist, bool(a <= 1.0), float(a), norm="oscillation",
                        notes="growth_rate is the decay exponent a of increments ~ log(1/delta)^-a")
