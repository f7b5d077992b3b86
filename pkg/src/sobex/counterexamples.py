"""Lower bounds for the energy of any extension in the two sharpness examples:
the spiral domain (W^{1,1} fails) and the cusp map (W^{1,p} fails), by slices
whose sides are mapped far apart."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary_maps import EpsSequence, cusp_levels, cusp_separations, spiral_separations
from .energy import ESCALATION, EnergyReport, escalation, sobolev_value
from .geometry import spiral_layout

CERTIFICATE_FACTOR = 1.01


class SliceError(ValueError):
    pass


@dataclass
class Slice:
    """Axis-parallel box x0 < x < x1, y0 < y < y1 whose two sides are mapped
    at least `separation` apart; `area` is the part of the box in the domain."""

    x0: float
    x1: float
    y0: float
    y1: float
    separation: float
    area: float

    @property
    def height(self):
        return self.y1 - self.y0


@dataclass
class SliceFamily:
    slices: list
    kind: str
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.slices)

    @property
    def heights(self):
        return np.array([s.height for s in self.slices])

    @property
    def separations(self):
        return np.array([s.separation for s in self.slices])

    def disjoint(self):
        for i, a in enumerate(self.slices):
            for b in self.slices[i + 1:]:
                if a.x0 < b.x1 and b.x0 < a.x1 and a.y0 < b.y1 and b.y0 < a.y1:
                    return False
        return True


def spiral_slices(N, d=None, widths=None, heights=None, gaps=None) -> SliceFamily:
    """The rectangles R_k; their vertical sides go to points d_k apart."""
    a, b, h, _ = spiral_layout(N, widths, heights, gaps)
    d = spiral_separations(N) if d is None else np.asarray(d, float)[:N]
    sl = [Slice(a[k], b[k], 0.0, h[k], d[k], (b[k] - a[k]) * h[k]) for k in range(N)]
    return SliceFamily(sl, "spiral", {"N": N})


def cusp_slices(s, p, N, eps: EpsSequence | None = None, d=None) -> SliceFamily:
    """Strips S_k = X_s between the heights y_k < y < y_{k-1} of the cusp
    map; the left and right walls go to arcs no closer than d_k."""
    eps = eps or EpsSequence()
    y = cusp_levels(eps, N)
    d = cusp_separations(N, p) if d is None else np.asarray(d, float)[:N]
    q = 1.0 + 1.0 / s
    sl = []
    for k in range(1, N + 1):
        lo, hi = y[k], y[k - 1]
        area = 2.0 / q * (hi ** q - lo ** q)
        w = hi ** (1.0 / s)
        sl.append(Slice(-w, w, lo, hi, d[k - 1], area))
    return SliceFamily(sl, "cusp", {"s": s, "p": p, "N": N, "eps": f"{eps.kind}:{eps.rate}"})


def cusp_width_constant(s, N=100, eps: EpsSequence | None = None):
    """Widths of S_k against tail_k^(1/s): returns (ratios, fitted C)."""
    eps = eps or EpsSequence()
    fam = cusp_slices(s, 1.5, N, eps)
    k = np.arange(1, N + 1)
    widths = np.array([sl.x1 - sl.x0 for sl in fam.slices])
    ratios = widths / eps.tail(k) ** (1.0 / s)
    return ratios, float(np.max(ratios))


# -- partial sums -----------------------------------------------------------------------


def spiral_terms(N, h=None, d=None):
    k = np.arange(1, N + 1, dtype=float)
    h = 1.0 / k if h is None else np.asarray(h, float)[:N]
    d = 1.0 / np.log1p(k) if d is None else np.asarray(d, float)[:N]
    return h * d


def spiral_lower_bound(N, h=None, d=None):
    """sum_{k <= N} h_k d_k, a lower bound for the W^{1,1} energy."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return float(np.sum(spiral_terms(N, h, d)))


def cusp_terms(N, p, eps: EpsSequence | None = None, d=None):
    eps = eps or EpsSequence()
    k = np.arange(1, N + 1)
    d = cusp_separations(N, p) if d is None else np.asarray(d, float)[:N]
    return d ** p * eps(k) / eps.tail(k)


def cusp_lower_bound(N, p, eps: EpsSequence | None = None, d=None):
    """sum_{k <= N} d_k^p eps_k / sum_{j >= k} eps_j."""
    if not 1 < p < 2:
        raise ValueError("p must lie in (1, 2)")
    if N < 1:
        raise ValueError("N must be at least 1")
    return float(np.sum(cusp_terms(N, p, eps, d)))


def partial_sums_at(terms, levels):
    c = np.cumsum(terms)
    return np.array([c[n - 1] for n in levels])


@dataclass
class Certificate:
    levels: list
    sums: list
    certified: bool
    factor: float
    loglog_slope: float
    loglog_r2: float

    def to_dict(self):
        return {"schema_version": 1, "levels": [int(n) for n in self.levels],
                "partial_sums": [float(v) for v in self.sums], "certified": self.certified,
                "factor": self.factor, "loglog_slope": self.loglog_slope, "loglog_r2": self.loglog_r2}

    def to_csv(self):
        return "N,partial_sum\n" + "".join(f"{n},{v:.17g}\n" for n, v in zip(self.levels, self.sums))


def divergence_certificate(bound_fn, levels, factor=CERTIFICATE_FACTOR) -> Certificate:
    """Partial sums at increasing N; certified when each level exceeds the
    previous one by the factor. The sums are also fitted against log log N."""
    levels = [int(n) for n in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must increase")
    sums = np.array([bound_fn(n) for n in levels], float)
    flag, _ = escalation(sums, factor)
    x = np.log(np.log(np.maximum(levels, 3)))
    if len(levels) >= 2 and np.ptp(sums) > 0:
        A = np.c_[x, np.ones_like(x)]
        coef, *_ = np.linalg.lstsq(A, sums, rcond=None)
        r2 = 1 - np.sum((A @ coef - sums) ** 2) / np.sum((sums - sums.mean()) ** 2)
        slope = float(coef[0])
    else:
        slope, r2 = 0.0, 0.0
    return Certificate(levels, sums.tolist(), flag, factor, slope, float(r2))


# -- slices of a mesh field -------------------------------------------------------------


def _clip_area(tri, box):
    """Area of a triangle (3 complex vertices) inside an axis-parallel box."""
    x0, x1, y0, y1 = box
    poly = [complex(v) for v in tri]
    for axis, bound, keep_below in ((0, x0, False), (0, x1, True), (1, y0, False), (1, y1, True)):
        out = []
        n = len(poly)
        for i in range(n):
            P, Q = poly[i], poly[(i + 1) % n]
            cp = (P.real if axis == 0 else P.imag) - bound
            cq = (Q.real if axis == 0 else Q.imag) - bound
            if not keep_below:
                cp, cq = -cp, -cq
            if cp <= 0:
                out.append(P)
            if (cp < 0 < cq) or (cq < 0 < cp):
                out.append(P + (Q - P) * (cp / (cp - cq)))
        poly = out
        if len(poly) < 3:
            return 0.0
    z = np.array(poly)
    return 0.5 * abs(np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag))


@dataclass
class SliceBound:
    k: int
    area: float
    measured: float
    holder: float
    separation: float
    l1: float

    def to_dict(self):
        return {k: (float(v) if k != "k" else v) for k, v in self.__dict__.items()}


def slice_energy_bound(field, slices: SliceFamily, p, coverage=0.9):
    """Per slice: measured int |DH|^p, the Hölder bound (int |DH|)^p / |S|^(p-1)
    and the separation bound (d_k * height)^p / |S|^(p-1).

    Gradients are constant on elements, so every integral is an exact sum of
    clipped areas. The Hölder bound is evaluated as the measured value minus
    a sum of convexity gaps, each of which is nonnegative, so the computed
    bound never exceeds the computed energy.
    """
    mesh = field.mesh
    P = mesh.nodes[mesh.triangles]
    g = field.frobenius
    lo_y, hi_y = P.imag.min(axis=1), P.imag.max(axis=1)
    lo_x, hi_x = P.real.min(axis=1), P.real.max(axis=1)
    out = []
    for k, sl in enumerate(slices.slices, start=1):
        cand = np.flatnonzero((hi_y > sl.y0) & (lo_y < sl.y1) & (hi_x > sl.x0) & (lo_x < sl.x1))
        a = np.array([_clip_area(P[i], (sl.x0, sl.x1, sl.y0, sl.y1)) for i in cand])
        A = float(np.sum(a))
        if A <= 0 or A < coverage * sl.area:
            raise SliceError(f"slice {k} is not covered by the mesh ({A:.3g} of {sl.area:.3g})")
        gk = g[cand]
        measured = float(np.sum(a * gk ** p))
        l1 = float(np.sum(a * gk))
        m = l1 / A
        gaps = np.maximum(gk ** p - m ** p - p * m ** (p - 1) * (gk - m), 0.0)
        holder = measured - float(np.sum(a * gaps))
        sep = (sl.separation * sl.height) ** p / A ** (p - 1)
        out.append(SliceBound(k, A, measured, holder, sep, l1))
    return out


def cusp_slice_constant(bounds, p, eps: EpsSequence | None = None, d=None):
    """Empirical constant c with measured_k >= c d_k^p eps_k / tail_k."""
    n = len(bounds)
    ref = cusp_terms(n, p, eps, d)
    meas = np.array([b.measured for b in bounds])
    return meas / ref


# -- refinement study on the cusp ---------------------------------------------------------


def fem_escalation(s, p, levels=(1, 2, 3, 4, 5), eps: EpsSequence | None = None,
                   threshold=ESCALATION, depth=3) -> EnergyReport:
    """p-energy of the p-harmonic extension of the cusp boundary map of X_s on
    refined cusp meshes. Level L halves the mesh size and reaches depth*2^L
    octaves into the spike; the map is resolved through the deepest mesh."""
    from .boundary_maps import cusp_boundary_map
    from .extension import p_harmonic_extend
    from .geometry import make_cusp_domain
    from .mesh import cusp_mesh

    eps = eps or EpsSequence("geometric", 2.0)
    octaves = [depth * 2 ** L for L in levels]
    ymin = 2.0 ** (-max(octaves) - 2)
    N = int(np.searchsorted(-cusp_levels(eps, 4 * max(octaves)), -ymin))
    X = make_cusp_domain(s, 4096, ymin=ymin)
    phi = cusp_boundary_map(X, p, eps=eps, N=N)
    hist = []
    for L, oc in zip(levels, octaves):
        m = cusp_mesh(s, L, octaves=oc)
        f = p_harmonic_extend(phi, m, p)
        hist.append((m.n_nodes, sobolev_value(f, p)))
    vals = [v for _, v in hist]
    flag, rate = escalation(vals, threshold)
    return EnergyReport(vals[-1], p, hist, flag, rate,
                        notes=f"cusp s={s}, eps={eps.kind}:{eps.rate}, octaves={octaves}")
