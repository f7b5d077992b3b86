"""Jordan curves and domains in the plane.

Points are complex numbers. A curve is a closed polyline whose first and
last vertex coincide; an optional analytic tag records curves that have an
exact formula (currently only circles are evaluated analytically).
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from matplotlib.path import Path
from scipy.spatial import cKDTree

TWO_PI = 2.0 * np.pi


class GeometryError(ValueError):
    pass


def _as_complex(z):
    z = np.asarray(z)
    if z.ndim >= 1 and z.shape[-1] == 2 and not np.iscomplexobj(z):
        return z[..., 0] + 1j * z[..., 1]
    return z.astype(complex)


def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


def segment_distance(z, a, b):
    """Distance from points z to segments [a, b] (broadcasting)."""
    d = b - a
    dd = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, ((z - a) * np.conj(d)).real / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def segment_crossings(a, b, ends=None, skip_adjacent_cycle=False):
    """Index pairs (i, j), i < j, of closed segments [a_i, b_i] that intersect.

    `ends` is an optional (n, 2) array of endpoint ids; pairs sharing an id
    are skipped. With `skip_adjacent_cycle` segments i and i+1 (mod n) are
    skipped, which is the right rule for a closed polyline.
    """
    a = np.asarray(a, complex)
    b = np.asarray(b, complex)
    n = len(a)
    if n < 2:
        return np.zeros((0, 2), int)
    xmin = np.minimum(a.real, b.real)
    xmax = np.maximum(a.real, b.real)
    ymin = np.minimum(a.imag, b.imag)
    ymax = np.maximum(a.imag, b.imag)
    seglen = np.abs(b - a)
    order = np.argsort(xmin, kind="stable")
    xs = xmin[order]
    hi = np.searchsorted(xs, xmax[order], side="right")
    out = []
    for k in range(n):
        if hi[k] <= k + 1:
            continue
        i = order[k]
        c = order[k + 1:hi[k]]
        c = c[(ymin[c] <= ymax[i]) & (ymax[c] >= ymin[i])]
        if skip_adjacent_cycle and len(c):
            c = c[((c - i) % n != 1) & ((i - c) % n != 1)]
        if ends is not None and len(c):
            e = ends[i]
            c = c[(ends[c, 0] != e[0]) & (ends[c, 0] != e[1])
                  & (ends[c, 1] != e[0]) & (ends[c, 1] != e[1])]
        if not len(c):
            continue
        p, q = a[i], b[i]
        r, s = a[c], b[c]
        d1 = _cross(q - p, r - p)
        d2 = _cross(q - p, s - p)
        d3 = _cross(s - r, p - r)
        d4 = _cross(s - r, q - r)
        proper = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d3) * np.sign(d4) < 0)
        # touching is judged relative to the local segment scale
        tol = 1e-12 * np.minimum(seglen[i], seglen[c])
        touch = ((segment_distance(r, p, q) <= tol) | (segment_distance(s, p, q) <= tol)
                 | (segment_distance(p, r, s) <= tol) | (segment_distance(q, r, s) <= tol))
        hit = c[proper | touch]
        out.extend((min(i, j), max(i, j)) for j in hit)
    if not out:
        return np.zeros((0, 2), int)
    return np.unique(np.array(out, int), axis=0)


class JordanCurve:
    """Closed simple polyline with arc-length tables."""

    def __init__(self, vertices, analytic_tag=None, check_simple=True):
        v = _as_complex(np.asarray(vertices))
        if v.ndim != 1 or len(v) < 3:
            raise GeometryError("a curve needs at least three vertices")
        if v[0] != v[-1]:
            v = np.r_[v, v[0]]
        seg = np.abs(np.diff(v))
        if np.any(seg <= 0):
            keep = np.r_[True, seg > 0]
            v = v[keep]
            seg = np.abs(np.diff(v))
        if len(v) < 4 or seg.sum() <= 0:
            raise GeometryError("degenerate curve")
        self.vertices = v
        self.analytic_tag = analytic_tag
        self.seglen = seg
        self.cumulative_arclength = np.r_[0.0, np.cumsum(seg)]
        # distance from vertex i forward to the closing vertex, summed from the end
        self._remaining = np.r_[np.cumsum(seg[::-1])[::-1], 0.0]
        self.length = float(self.cumulative_arclength[-1])
        if check_simple:
            bad = self.self_intersections()
            if len(bad):
                raise GeometryError(f"curve is not simple: segments {bad[0].tolist()} cross")

    def __len__(self):
        return len(self.vertices) - 1

    @property
    def circle(self):
        """(center, radius) for analytic circles, else None."""
        tag = self.analytic_tag or ""
        if not tag.startswith("circle"):
            return None
        parts = tag.split(":")
        if len(parts) == 1:
            return 0j, 1.0
        cx, cy, r = (float(t) for t in parts[1].split(","))
        return complex(cx, cy), r

    @property
    def rectifiable(self):
        return not (self.analytic_tag or "").startswith("spiral")

    def self_intersections(self):
        v = self.vertices
        return segment_crossings(v[:-1], v[1:], skip_adjacent_cycle=True)

    def is_simple(self):
        return len(self.self_intersections()) == 0

    def signed_area(self):
        v = self.vertices
        return 0.5 * float(np.sum(_cross(v[:-1], v[1:])))

    # -- arc length parametrization -------------------------------------------

    def point_at(self, s):
        """Point at arc length s measured from the first vertex (periodic).

        Negative s is resolved from the closing vertex backwards, which keeps
        full relative precision for points just before the anchor.
        """
        s = np.asarray(s, float)
        L = self.length
        neg = (s < 0) & (s >= -L)
        sp = np.where(neg, 0.0, np.mod(s, L))
        i = np.clip(np.searchsorted(self.cumulative_arclength, sp, side="right") - 1, 0, len(self) - 1)
        t = (sp - self.cumulative_arclength[i]) / self.seglen[i]
        out = self.vertices[i] + t * (self.vertices[i + 1] - self.vertices[i])
        if np.any(neg):
            back = -s[neg]
            rem = self._remaining
            # segment j has remaining[j+1] <= back < remaining[j]
            j = np.clip(np.searchsorted(-rem, -back, side="left") - 1, 0, len(self) - 1)
            u = (back - rem[j + 1]) / self.seglen[j]
            out = np.array(out, complex)
            out[neg] = self.vertices[j + 1] + u * (self.vertices[j] - self.vertices[j + 1])
        return out

    def param(self, theta):
        """Constant-speed parametrization theta -> point, speed L/2pi."""
        theta = np.asarray(theta, float)
        c = self.circle
        if c is not None:
            v0 = self.vertices[0] - c[0]
            return c[0] + c[1] * np.exp(1j * (theta + np.angle(v0)))
        return self.point_at(theta * self.length / TWO_PI)

    def _nearest(self, z):
        z = np.atleast_1d(_as_complex(z))
        a, b = self.vertices[:-1], self.vertices[1:]
        best = np.full(z.shape, np.inf)
        seg = np.zeros(z.shape, int)
        if len(a) * z.size <= 4_000_000:
            d = segment_distance(z[:, None], a[None, :], b[None, :])
            seg = np.argmin(d, axis=1)
            best = d[np.arange(z.size), seg]
        else:
            # nearest sample points, then exact distances to their segments
            # and the neighbouring ones; when two branches lie far closer
            # than the local sample spacing the wrong one can win, an
            # absolute error far below the spacing
            idx = self._mid_tree.query(np.c_[z.real, z.imag], k=2)[1]
            n = len(a)
            own = self._mid_owner[idx]
            sid = np.concatenate([own, (own + 1) % n, (own - 1) % n], axis=1)
            d = segment_distance(z[:, None], a[sid], b[sid])
            j = np.argmin(d, axis=1)
            seg = sid[np.arange(z.size), j]
            best = d[np.arange(z.size), j]
        return best, seg

    def locate(self, z, signed=False):
        """Arc length of the nearest boundary point to z.

        With signed=True the result lies in [-L/2, L/2) and points just before
        the anchor vertex come back as small negative numbers.
        """
        z = np.atleast_1d(_as_complex(z))
        _, i = self._nearest(z)
        a, b = self.vertices[i], self.vertices[i + 1]
        d = b - a
        t = np.clip(((z - a) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
        fwd = self.cumulative_arclength[i] + t * self.seglen[i]
        if not signed:
            return np.mod(fwd, self.length)
        back = self._remaining[i + 1] + (1 - t) * self.seglen[i]
        return np.where(fwd < 0.5 * self.length, fwd, -back)

    def locate_angle(self, z, signed=False):
        c = self.circle
        if c is not None:
            ang = np.angle((np.atleast_1d(_as_complex(z)) - c[0]) / (self.vertices[0] - c[0]))
            return ang if signed else np.mod(ang, TWO_PI)
        return self.locate(z, signed) * TWO_PI / self.length

    @cached_property
    def _mid_tree(self):
        # split long segments so every piece is short relative to the curve
        a, b = self.vertices[:-1], self.vertices[1:]
        h = self.length / 8192
        reps = np.maximum(1, np.ceil(self.seglen / h).astype(int))
        owner = np.repeat(np.arange(len(a)), reps)
        start = np.r_[0, np.cumsum(reps)[:-1]]
        frac = (np.arange(reps.sum()) - np.repeat(start, reps) + 0.5) / np.repeat(reps, reps)
        mids = a[owner] + frac * (b[owner] - a[owner])
        self._mid_owner = owner
        # sliding-midpoint splits cope with the extreme clustering at cusp tips
        return cKDTree(np.c_[mids.real, mids.imag], compact_nodes=False, balanced_tree=False)

    def dist(self, z):
        z = _as_complex(z)
        c = self.circle
        if c is not None:
            return np.abs(c[1] - np.abs(z - c[0]))
        scalar = np.ndim(z) == 0
        out = np.empty(np.size(z))
        flat = np.ravel(z)
        for lo in range(0, flat.size, 200_000):
            out[lo:lo + 200_000] = self._nearest(flat[lo:lo + 200_000])[0]
        return float(out[0]) if scalar else out.reshape(np.shape(z))

    @cached_property
    def _path(self):
        v = self.vertices
        return Path(np.c_[v.real, v.imag], closed=True)

    def bbox(self):
        v = self.vertices
        return (v.real.min(), v.imag.min(), v.real.max(), v.imag.max())

    def to_dict(self):
        v = self.vertices[:-1]
        return {"vertices": np.c_[v.real, v.imag].tolist(), "analytic_tag": self.analytic_tag}


class JordanDomain:
    """Bounded domain enclosed by a positively oriented Jordan curve."""

    def __init__(self, boundary: JordanCurve, witness=None):
        if boundary.signed_area() < 0:
            raise GeometryError("boundary must be counterclockwise")
        self.boundary = boundary
        self.bounding_box = boundary.bbox()
        if witness is None:
            witness = self._find_witness()
        self.witness = complex(witness)
        if not self.contains(self.witness) or self.dist(self.witness) <= 0:
            raise GeometryError("witness point is not interior")

    def _find_witness(self):
        x0, y0, x1, y1 = self.bounding_box
        xs, ys = np.meshgrid(np.linspace(x0, x1, 41)[1:-1], np.linspace(y0, y1, 41)[1:-1])
        z = (xs + 1j * ys).ravel()
        z = z[self.contains(z)]
        if not len(z):
            raise GeometryError("could not find an interior point")
        return z[np.argmax(self.dist(z))]

    def dist(self, z):
        return self.boundary.dist(z)

    def contains(self, z):
        z = _as_complex(z)
        scalar = np.ndim(z) == 0
        flat = np.atleast_1d(z).ravel()
        c = self.boundary.circle
        if c is not None:
            inside = np.abs(flat - c[0]) < c[1]
            return bool(inside[0]) if scalar else inside.reshape(np.shape(z))
        inside = self.boundary._path.contains_points(np.c_[flat.real, flat.imag])
        if inside.any():
            scale = max(self.bounding_box[2] - self.bounding_box[0], self.bounding_box[3] - self.bounding_box[1])
            inside[inside] = self.dist(flat[inside]) > 1e-12 * scale
        return bool(inside[0]) if scalar else inside.reshape(np.shape(z))

    def diameter(self):
        v = self.boundary.vertices[:-1]
        if len(v) > 4000:
            v = v[np.linspace(0, len(v) - 1, 4000).astype(int)]
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    def to_dict(self):
        return self.boundary.to_dict()


# -- module level helpers ----------------------------------------------------


def arc_length(curve: JordanCurve) -> float:
    return curve.length


def constant_speed_param(curve: JordanCurve):
    if curve.length <= 0:
        raise GeometryError("degenerate curve")
    return curve.param


def dist_to_boundary(domain: JordanDomain, z):
    return domain.dist(z)


def contains(domain: JordanDomain, z):
    return domain.contains(z)


# -- catalog -----------------------------------------------------------------


def make_polygon(vertices, witness=None):
    return JordanDomain(JordanCurve(vertices), witness)


def make_disk(resolution=4096, center=0j, radius=1.0):
    ang = TWO_PI * np.arange(resolution) / resolution
    v = center + radius * np.exp(1j * ang)
    tag = "circle" if center == 0 and radius == 1 else f"circle:{center.real},{center.imag},{radius}"
    return JordanDomain(JordanCurve(v, tag, check_simple=False), center)


def make_square(side=1.0):
    return make_polygon([0, side, side + 1j * side, 1j * side])


def make_regular_polygon(n, radius=1.0, phase=0.0):
    ang = phase + TWO_PI * np.arange(n) / n
    return make_polygon(radius * np.exp(1j * ang), 0j)


def cusp_graph_heights(resolution, ymin=1e-10):
    """y-levels used on each graph branch of the cusp curve, graded toward 0."""
    n_geo = max(resolution // 2, 8)
    geo = np.geomspace(ymin, 1.0, n_geo)
    lin = np.linspace(0.0, 1.0, resolution - n_geo + 2)[1:]
    return np.unique(np.r_[geo, lin])


def make_cusp_domain(s, resolution=2048, ymin=1e-10):
    """Domain above the graph y = |x|^s (|x| <= 1) and below the arc |z - i| = 1;
    the graphs are sampled geometrically down to height ymin."""
    if not 0 < s < 1:
        raise GeometryError("cusp exponent s must lie in (0, 1)")
    y = cusp_graph_heights(resolution, ymin)
    x = y ** (1.0 / s)
    x[-1], y[-1] = 1.0, 1.0
    right = x + 1j * y
    n_arc = max(resolution // 2, 16)
    arc = 1j + np.exp(1j * np.pi * np.arange(1, n_arc) / n_arc)
    left = (-right.real + 1j * right.imag)[::-1]
    v = np.r_[0j, right, arc, left]
    return JordanDomain(JordanCurve(v, f"cusp:{s}"), 0.5j + 0.5j)


def spiral_layout(N, widths=None, heights=None, gaps=None):
    k = np.arange(1, N + 1, dtype=float)
    w = np.asarray(widths if widths is not None else 1.0 / k ** 2, float)[:N]
    h = np.asarray(heights if heights is not None else 1.0 / k, float)[:N]
    g = np.asarray(gaps if gaps is not None else w, float)[:N]
    if len(w) < N or len(h) < N or len(g) < N:
        raise GeometryError("sequences shorter than N")
    if np.any(w <= 0) or np.any(h <= 0) or np.any(g <= 0):
        raise GeometryError("widths, heights and gaps must be positive")
    if np.any(np.diff(h) > 0):
        raise GeometryError("heights must be nonincreasing")
    # connector after rectangle k: wall, return strip, wall, each g_k/3 wide
    t = g / 3.0
    a = np.zeros(N)
    for j in range(1, N):
        a[j] = a[j - 1] + w[j - 1] + g[j - 1]
    b = a + w
    return a, b, h, t


def spiral_vertices(N, widths=None, heights=None, gaps=None):
    """Counterclockwise vertex list of the spiral domain, starting at the
    midpoint of the closing cap on top of the last rectangle."""
    a, b, h, t = spiral_layout(N, widths, heights, gaps)
    v = [0.5 * (a[-1] + b[-1]) + 1j * h[-1], a[-1] + 1j * h[-1], a[-1] + 0j]
    for k in range(N - 2, -1, -1):
        v += [b[k] + 2 * t[k], b[k] + 2 * t[k] + 1j * (h[k] + t[k]),
              a[k] + 1j * (h[k] + t[k]), a[k] + 1j * h[k], a[k] + 0j]
    for k in range(N):
        v += [b[k] + 0j, b[k] + 1j * h[k]]
        if k < N - 1:
            v += [b[k] + t[k] + 1j * h[k], b[k] + t[k] - 1j * t[k], b[k + 1] - 1j * t[k]]
    return np.array(v)


def make_spiral_domain(N, widths=None, heights=None, gaps=None):
    """N rectangles [a_k, b_k] x [0, h_k] on the x-axis joined by U-shaped
    connector strips, with a cap closing the last rectangle.

    After rectangle k the strip climbs over a wall of width g_k/3, drops into
    a trench below the axis and rises into rectangle k+1.
    """
    v = spiral_vertices(N, widths, heights, gaps)
    a, b, h, _ = spiral_layout(N, widths, heights, gaps)
    witness = 0.5 * (a[0] + b[0]) + 0.5j * h[0]
    try:
        curve = JordanCurve(v, f"spiral:{N}")
    except GeometryError as e:
        raise GeometryError(f"overlapping rectangles: {e}") from None
    return JordanDomain(curve, witness)


def phi_tau_boundary(tau, theta):
    z = np.exp(1j * np.asarray(theta, float))
    w = (1 - z) / 3.0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.exp(-1j * np.pi * tau) * (-np.log(w)) ** (-tau)
    return np.where(np.mod(theta, TWO_PI) == 0, 0j, val)


def make_target_Ytau(tau, resolution=4096):
    if not 0 < tau <= 1:
        raise GeometryError("tau must lie in (0, 1]")
    theta = TWO_PI * np.arange(resolution) / resolution
    v = phi_tau_boundary(tau, theta)
    from .conformal import phi_tau

    return JordanDomain(JordanCurve(v, f"phi_tau:{tau}"), complex(phi_tau(tau).eval(0.0)))
