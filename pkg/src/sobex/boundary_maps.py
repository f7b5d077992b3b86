"""Monotone degree-one boundary maps between parametrized Jordan curves.

A map is stored as a knot table of angle pairs (theta_i, t_i): theta is the
constant-speed angle on the source curve, t the constant-speed angle on the
target curve, and t is piecewise linear in theta with t(theta + 2pi) =
t(theta) + 2pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .geometry import TWO_PI, JordanCurve, make_disk, spiral_layout

UNIT_CIRCLE = make_disk(4096).boundary


class MapError(ValueError):
    pass


def same_curve(a: JordanCurve, b: JordanCurve) -> bool:
    if a is b:
        return True
    if a.circle is not None and b.circle is not None:
        return a.circle == b.circle and np.angle(a.vertices[0] - a.circle[0]) == np.angle(b.vertices[0] - b.circle[0])
    return a.analytic_tag == b.analytic_tag and a.vertices.shape == b.vertices.shape and np.array_equal(a.vertices, b.vertices)


@dataclass(frozen=True, eq=False)
class CircleMap:
    theta: np.ndarray
    t: np.ndarray
    source: JordanCurve = UNIT_CIRCLE
    target: JordanCurve = UNIT_CIRCLE

    def __post_init__(self):
        th = np.asarray(self.theta, float)
        t = np.asarray(self.t, float)
        if th.shape != t.shape or th.ndim != 1 or len(th) < 2:
            raise MapError("knot arrays must be 1-d and of equal length")
        if not (np.all(np.diff(th) > 0) and np.all(np.diff(t) > 0)):
            raise MapError("knots must be strictly increasing")
        if abs(th[-1] - th[0] - TWO_PI) > 1e-9 or abs(t[-1] - t[0] - TWO_PI) > 1e-9:
            raise MapError("knots must span exactly one turn (degree one)")
        th[-1] = th[0] + TWO_PI
        t[-1] = t[0] + TWO_PI
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "t", t)

    def _reduce(self, theta):
        theta = np.asarray(theta, float)
        lo = self.theta[0]
        inside = (theta >= lo) & (theta <= lo + TWO_PI)
        # only wrap values that are out of range, so tiny angles keep precision
        return np.where(inside, theta, lo + np.mod(theta - lo, TWO_PI)), np.where(
            inside, 0.0, theta - lo - np.mod(theta - lo, TWO_PI))

    def angle(self, theta):
        """Target angle t(theta)."""
        red, shift = self._reduce(theta)
        return np.interp(red, self.theta, self.t) + shift

    def slope(self, theta):
        """dt/dtheta (right derivative)."""
        red, _ = self._reduce(theta)
        i = np.clip(np.searchsorted(self.theta, red, side="right") - 1, 0, len(self.theta) - 2)
        return np.diff(self.t)[i] / np.diff(self.theta)[i]

    def evaluate(self, theta):
        return self.target.param(self.angle(theta))

    __call__ = evaluate

    def derivative(self, theta):
        """d/dtheta of evaluate, exact for circle or polyline targets."""
        t = self.angle(theta)
        ds = self.slope(theta)
        c = self.target.circle
        if c is not None:
            return 1j * (self.target.param(t) - c[0]) * ds
        L = self.target.length
        s = np.mod(t * L / TWO_PI, L)
        cum = self.target.cumulative_arclength
        i = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(self.target) - 1)
        v = self.target.vertices
        tangent = (v[i + 1] - v[i]) / self.target.seglen[i]
        return tangent * ds * L / TWO_PI

    def at_points(self, z):
        """Trace value at source-curve points z."""
        return self.evaluate(self.source.locate_angle(z, signed=True))

    def lipschitz(self):
        """Lipschitz constant of the angle map rescaled to arc length."""
        return float(np.max(np.diff(self.t) / np.diff(self.theta))) * self.target.length / self.source.length

    def with_target(self, target):
        return CircleMap(self.theta, self.t, self.source, target)

    def to_dict(self):
        return {"schema_version": 1, "knots": np.c_[self.theta, self.t].tolist(),
                "source": self.source.to_dict(), "target": self.target.to_dict()}

    @classmethod
    def from_dict(cls, d):
        from .geometry import JordanCurve as JC

        def curve(c):
            if (c.get("analytic_tag") or "").startswith("circle"):
                tag = c["analytic_tag"]
                if tag == "circle":
                    return UNIT_CIRCLE
            v = np.asarray(c["vertices"], float)
            return JC(v[:, 0] + 1j * v[:, 1], c.get("analytic_tag"), check_simple=False)

        k = np.asarray(d["knots"], float)
        return cls(k[:, 0], k[:, 1], curve(d["source"]), curve(d["target"]))


def identity_map(curve: JordanCurve = UNIT_CIRCLE) -> CircleMap:
    return CircleMap(np.array([0.0, TWO_PI]), np.array([0.0, TWO_PI]), curve, curve)


def rotation(alpha, curve: JordanCurve = UNIT_CIRCLE) -> CircleMap:
    return CircleMap(np.array([0.0, TWO_PI]), np.array([alpha, alpha + TWO_PI]), curve, curve)


def knot_map(knots, source=UNIT_CIRCLE, target=UNIT_CIRCLE) -> CircleMap:
    k = np.asarray(knots, float)
    return CircleMap(k[:, 0], k[:, 1], source, target)


def invert(f: CircleMap) -> CircleMap:
    return CircleMap(f.t.copy(), f.theta.copy(), f.target, f.source)


def compose(f: CircleMap, g: CircleMap) -> CircleMap:
    """f after g."""
    if not same_curve(g.target, f.source):
        raise MapError("compose: target of the inner map is not the source of the outer map")
    lo = g.theta[0]
    # pull f's knots back through g, shifted into g's window
    fk = invert(g).angle(f.theta)
    fk = lo + np.mod(fk - lo, TWO_PI)
    th = np.unique(np.r_[g.theta[:-1], fk])
    th = th[(th >= lo) & (th < lo + TWO_PI)]
    th = np.r_[th, lo + TWO_PI]
    t = f.angle(g.angle(th))
    t[-1] = t[0] + TWO_PI
    keep = np.r_[True, (np.diff(th) > 0) & (np.diff(t) > 0)]
    return CircleMap(th[keep], t[keep], g.source, f.target)


def random_monotone_map(rng, n_knots=12, source=UNIT_CIRCLE, target=UNIT_CIRCLE, spread=1.0):
    """Random piecewise-linear circle homeomorphism with Dirichlet-distributed steps."""
    th = np.r_[0.0, np.cumsum(rng.dirichlet(np.full(n_knots, spread)))] * TWO_PI
    t0 = rng.uniform(0, TWO_PI)
    t = t0 + np.r_[0.0, np.cumsum(rng.dirichlet(np.full(n_knots, spread)))] * TWO_PI
    return CircleMap(th, t, source, target)


def cascade_map(weight, depth=16, phase=0.0):
    """Circle map whose angle function is the distribution of a binomial cascade.

    Each dyadic interval passes a fraction `weight` of its mass to its left
    half. For weight != 1/2 the resulting homeomorphism is singular and not
    Lipschitz; the knot table resolves it to 2^-depth of a turn.
    """
    mass = np.array([1.0])
    for _ in range(depth):
        mass = np.c_[weight * mass, (1 - weight) * mass].ravel()
    t = np.r_[0.0, np.cumsum(mass)] * TWO_PI
    t[-1] = TWO_PI
    th = TWO_PI * np.arange(len(t)) / (len(t) - 1)
    return CircleMap(th, t + phase, UNIT_CIRCLE, UNIT_CIRCLE)


# -- counterexample maps -----------------------------------------------------


def _check_separations(d):
    d = np.asarray(d, float)
    if np.any(d <= 0) or np.any(np.diff(d) >= 0):
        raise MapError("separations d_k must be positive and strictly decreasing")
    if d[0] >= 2.0:
        raise MapError("infeasible angular budget: d_1 must be below the diameter 2")
    return np.arcsin(d / 2.0)


def spiral_separations(N):
    k = np.arange(1, N + 1)
    return 1.0 / np.log(1.0 + k)


def spiral_boundary_map(domain, d=None, widths=None, heights=None, gaps=None) -> CircleMap:
    """Boundary map of the spiral domain onto the unit circle.

    The left side of rectangle k goes to the arc A_k^+ = {e^{ia}: beta_k <= a <=
    alpha_k} and the right side to its mirror image, so the two image arcs are
    at chordal distance 2 sin(beta_k) > d_k. Each arc sits in the middle third
    of its feasible window (arcsin(d_k/2), upper_k).
    """
    curve = domain.boundary
    N = int(curve.analytic_tag.split(":")[1])
    a, b, h, _ = spiral_layout(N, widths, heights, gaps)
    d = spiral_separations(N) if d is None else np.asarray(d, float)[:N]
    m = _check_separations(d)
    upper = np.r_[np.pi / 2, m[:-1]]
    beta = m + (upper - m) / 3
    alpha = m + 2 * (upper - m) / 3
    left_top = curve.locate_angle(a + 1j * h)
    left_bot = curve.locate_angle(a + 0j)
    right_bot = curve.locate_angle(b + 0j)
    right_top = curve.locate_angle(b + 1j * h)
    th = [0.0]
    t = [0.0]
    for k in range(N - 1, -1, -1):
        th += [left_top[k], left_bot[k]]
        t += [beta[k], alpha[k]]
    for k in range(N):
        th += [right_bot[k], right_top[k]]
        t += [TWO_PI - alpha[k], TWO_PI - beta[k]]
    th.append(TWO_PI)
    t.append(TWO_PI)
    return CircleMap(np.array(th), np.array(t), curve, UNIT_CIRCLE)


def cusp_separations(N, p):
    k = np.arange(1, N + 1)
    return np.log(1.0 + k) ** (-1.0 / p)


@dataclass(frozen=True)
class EpsSequence:
    """Summable positive sequence eps_k (k >= 1) with its tail sums."""

    kind: str = "power"
    rate: float = 2.0

    def __call__(self, k):
        k = np.asarray(k, float)
        if self.kind == "power":
            return k ** (-self.rate)
        return self.rate ** (-k)

    def tail(self, k):
        """sum_{j >= k} eps_j in closed form."""
        k = np.asarray(k, float)
        if self.kind == "power":
            return zeta(self.rate, k)
        return self.rate ** (-k) / (1 - 1 / self.rate)

    @classmethod
    def parse(cls, spec):
        if spec in (None, "", "default"):
            return cls()
        kind, _, r = spec.partition(":")
        if kind not in ("power", "geometric"):
            raise ValueError(f"unknown sequence {spec!r}")
        return cls(kind, float(r))


def cusp_levels(eps: EpsSequence, N):
    """Normalized heights y_k = tail_{k+1}/tail_1 for k = 0..N, so y_0 = 1 and
    y_{k-1} - y_k is eps_k over the total."""
    k = np.arange(0, N + 1)
    return eps.tail(k + 1) / eps.tail(1)


def cusp_boundary_map(domain, p, eps: EpsSequence | None = None, N=100, d=None) -> CircleMap:
    """Boundary map of the cusp domain X_{p-1} onto the unit circle.

    The boundary arc between the graph points p_{k-1}^+ and p_k^+ goes with
    constant speed onto the circle arc from a_{k-1}^+ to a_k^+, where a_k^+ =
    e^{i alpha_k} and the chord to the mirror point a_k^- is d_k. The origin
    goes to 1.
    """
    curve = domain.boundary
    s = float(curve.analytic_tag.split(":")[1])
    eps = eps or EpsSequence()
    d = cusp_separations(N, p) if d is None else np.asarray(d, float)[:N]
    alpha = _check_separations(d)
    alpha0 = 0.5 * (alpha[0] + np.pi / 2)
    alpha = np.r_[alpha0, alpha]
    y = cusp_levels(eps, N)
    x = y ** (1.0 / s)
    x[0], y[0] = 1.0, 1.0
    th_r = curve.locate_angle(x + 1j * y, signed=True)
    th_l = curve.locate_angle(-x + 1j * y, signed=True)
    # table starts at p_0^- (negative angle) and runs once around
    th = np.r_[th_l, 0.0, th_r[::-1], th_l[0] + TWO_PI]
    t = np.r_[-alpha, 0.0, alpha[::-1], TWO_PI - alpha[0]]
    keep = np.r_[True, np.diff(th) > 0]
    if not np.all(keep):
        raise MapError("cusp levels are not resolved by the boundary polyline")
    return CircleMap(th, t, curve, UNIT_CIRCLE)
