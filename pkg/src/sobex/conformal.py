"""Analytic maps of the closed unit disk: identity, Moebius maps and the
logarithmic cusp maps z -> log^{-tau}((1 - z)/3)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SingularPointError(ValueError):
    pass


@dataclass(frozen=True)
class AnalyticMap:
    kind: str
    params: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind == "moebius":
            a, b, c, d = self.params
            if a * d - b * c == 0:
                raise ValueError("moebius map needs ad - bc != 0")
        elif self.kind == "phi_tau":
            (tau,) = self.params
            if not 0 < tau <= 1:
                raise ValueError("tau must lie in (0, 1]")
        elif self.kind != "identity":
            raise ValueError(f"unknown map kind {self.kind!r}")

    @property
    def singular_points(self):
        if self.kind == "phi_tau":
            return (1 + 0j,)
        if self.kind == "moebius":
            a, b, c, d = self.params
            if c != 0 and abs(d / c) <= 1:
                return (-d / c,)
        return ()

    def _check(self, z):
        z = np.asarray(z, complex)
        if np.any(np.abs(z) > 1 + 1e-12):
            raise ValueError("point outside the closed unit disk")
        for s in self.singular_points:
            if np.any(z == s):
                raise SingularPointError(f"map is singular at {s}")
        return z

    def eval(self, z):
        z = self._check(z)
        if self.kind == "identity":
            return z.copy() if z.ndim else complex(z)
        if self.kind == "moebius":
            a, b, c, d = self.params
            return (a * z + b) / (c * z + d)
        (tau,) = self.params
        # (-log w)^(-tau) lives in the right half plane, so the principal power
        # is continuous on the whole disk; the phase factor restores log^{-tau} w.
        return np.exp(-1j * np.pi * tau) * (-np.log((1 - z) / 3.0)) ** (-tau)

    __call__ = eval

    def derivative(self, z):
        z = self._check(z)
        if self.kind == "identity":
            return np.ones_like(z) if z.ndim else 1 + 0j
        if self.kind == "moebius":
            a, b, c, d = self.params
            return (a * d - b * c) / (c * z + d) ** 2
        (tau,) = self.params
        u = -np.log((1 - z) / 3.0)
        return -tau * np.exp(-1j * np.pi * tau) * u ** (-tau - 1) / (1 - z)

    def boundary_value(self, z):
        """Like eval but returns the continuous boundary limit at singular points."""
        z = np.asarray(z, complex)
        if self.kind == "phi_tau":
            out = np.zeros(z.shape, complex)
            ok = z != 1
            out[ok] = self.eval(z[ok])
            return out if z.ndim else complex(out)
        return self.eval(z)

    def spec(self):
        if self.kind == "identity":
            return "identity"
        return self.kind + ":" + ",".join(repr(p) for p in self.params)


def identity():
    return AnalyticMap("identity")


def moebius(a, b, c, d):
    return AnalyticMap("moebius", (complex(a), complex(b), complex(c), complex(d)))


def disk_automorphism(a, phase=0.0):
    """z -> e^{i phase} (z - a)/(1 - conj(a) z)."""
    e = np.exp(1j * phase)
    return moebius(e, -e * a, -np.conj(a), 1)


def phi_tau(tau):
    return AnalyticMap("phi_tau", (float(tau),))


def parse_map(spec: str) -> AnalyticMap:
    """Parse strings like 'identity', 'phi_tau:0.5', 'moebius:1,0,0,1'."""
    name, _, rest = spec.partition(":")
    if name == "identity":
        return identity()
    if name == "phi_tau":
        return phi_tau(float(rest))
    if name == "moebius":
        return moebius(*(complex(t.replace(" ", "")) for t in rest.split(",")))
    raise ValueError(f"unknown map spec {spec!r}")


def hardy_norm(f, p, r_grid, theta_grid=None):
    """max over r of the L^p circle mean of f (a callable analytic function).

    Also returns the per-radius means, which should be nondecreasing in r.
    """
    if theta_grid is None:
        theta_grid = 2 * np.pi * np.arange(4096) / 4096
    th = np.sort(np.mod(np.asarray(theta_grid, float), 2 * np.pi))
    # periodic trapezoid weights, so graded grids are allowed
    gaps = np.diff(np.r_[th, th[0] + 2 * np.pi])
    w = 0.5 * (gaps + np.roll(gaps, 1)) / (2 * np.pi)
    r_grid = np.asarray(r_grid, float)
    means = np.array([np.sum(w * np.abs(f(r * np.exp(1j * th))) ** p) ** (1.0 / p) for r in r_grid])
    return float(means.max()), means


def koebe_ratio(g: AnalyticMap, domain, z):
    """dist(g(z), boundary) / ((1 - |z|) |g'(z)|).

    For a univalent g onto the domain the Koebe quarter theorem puts this in
    [(1 + |z|)/4, 1 + |z|], up to the polyline approximation of the boundary.
    """
    z = np.asarray(z, complex)
    if np.any(np.abs(z) >= 1):
        raise ValueError("z must lie in the open disk")
    return domain.dist(g.eval(z)) / ((1 - np.abs(z)) * np.abs(g.derivative(z)))
