"""Integral functionals: Douglas-type boundary energies, Sobolev p-energies of
mesh fields, the disk integral bounded by M, and Carleson box ratios."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .boundary_maps import CircleMap, invert
from .geometry import TWO_PI
from .parallel import pmap

ESCALATION = 1.10


@dataclass
class EnergyReport:
    value: float
    p: float
    history: list = field(default_factory=list)
    divergence_flag: bool = False
    growth_rate: float = 0.0
    norm: str = "frobenius"
    notes: str = ""

    def to_dict(self):
        return {"schema_version": 1, "value": float(self.value), "p": float(self.p),
                "history": [[float(a), float(b)] for a, b in self.history],
                "divergent": bool(self.divergence_flag), "growth_rate": float(self.growth_rate),
                "norm": self.norm, "notes": self.notes}


def escalation(values, threshold=ESCALATION):
    """(flag, rate): flag when every successive value grows by the threshold
    factor; rate is the mean log2 growth per level."""
    v = np.asarray(values, float)
    if len(v) < 2 or np.any(v <= 0):
        return False, 0.0
    ratios = v[1:] / v[:-1]
    return bool(np.all(ratios >= threshold)), float(np.mean(np.log2(ratios)))


def report_from_history(history, p, threshold=ESCALATION, **kw):
    vals = [h[1] for h in history]
    flag, rate = escalation(vals, threshold)
    return EnergyReport(vals[-1], p, list(history), flag, rate, **kw)


def _samples(phi, M):
    th = TWO_PI * np.arange(M) / M
    return np.asarray(phi(th), complex)


# -- boundary energies -------------------------------------------------------------


def douglas_level(phi, level):
    """Band-excluded Douglas sum on M = 2^(11+level) uniform nodes with
    band width 0.04 * 2^-level in chord length."""
    M = 2 ** (11 + level)
    band = 0.04 * 2.0 ** (-level)
    f = _samples(phi, M)
    F = np.fft.fft(f)
    corr = np.fft.ifft(np.abs(F) ** 2)  # corr[l] = sum_i f_{i+l} conj f_i
    S = 2 * np.sum(np.abs(f) ** 2) - 2 * corr.real
    lag = np.arange(1, M)
    chord = 2 * np.abs(np.sin(np.pi * lag / M))
    keep = chord >= band
    return float((TWO_PI / M) ** 2 * np.sum(S[1:][keep] / chord[keep] ** 2))


def douglas(phi, levels=6, threshold=ESCALATION) -> EnergyReport:
    """Double integral of |phi(x) - phi(y)|^2 / |x - y|^2 over the unit circle,
    with the near-diagonal band excluded and shrunk level by level."""
    hist = [(2 ** (11 + k), douglas_level(phi, k)) for k in range(levels)]
    return report_from_history(hist, 2.0, threshold, notes="diagonal band |x-y| < 0.04*2^-level excluded")


def p_douglas_level(phi, p, j):
    M = 1024 * 2 ** j
    band = 0.04 * 2.0 ** (-j)
    f = _samples(phi, M)
    total = 0.0
    for lag in range(1, M // 2 + 1):
        chord = 2 * abs(np.sin(np.pi * lag / M))
        if chord < band:
            continue
        s = np.sum(np.abs(f - np.roll(f, -lag)) ** p) / chord ** p
        total += s if 2 * lag != M else 0.5 * s
    return float(2 * total * (TWO_PI / M) ** 2)


def p_douglas(phi, p, levels=5, threshold=ESCALATION) -> EnergyReport:
    if p < 2:
        raise ValueError("the p-Douglas condition is stated for p >= 2")
    hist = [(1024 * 2 ** j, p_douglas_level(phi, p, j)) for j in range(levels)]
    return report_from_history(hist, p, threshold)


def _band_log_integral(a, b):
    """int_{-b}^{b} |log(a|u|)| du."""
    A = a * b
    F = np.where(A <= 1, A - A * np.log(np.maximum(A, 1e-300)), A * np.log(np.maximum(A, 1e-300)) - A + 2)
    return 2.0 / a * F


def inverse_douglas_level(phi: CircleMap, M, K=4):
    target = phi.target
    L = target.length
    h = TWO_PI / M
    t = h * np.arange(M)
    inv = invert(phi)
    th = inv.angle(t)
    z = phi.source.param(th)
    speed = np.abs(phi.source.param(th + 1e-7) - phi.source.param(th - 1e-7)) / 2e-7
    a = speed / np.maximum(phi.slope(th), 1e-300)  # |dz/dt|
    total = 0.0
    for lag in range(K, M - K + 1):
        total += np.sum(np.abs(np.log(np.abs(z - np.roll(z, -lag)))))
    total *= h * h
    total += h * np.sum(_band_log_integral(a, (K - 0.5) * h))
    return float(total * (L / TWO_PI) ** 2)


def inverse_douglas(phi: CircleMap, levels=4, threshold=ESCALATION) -> EnergyReport:
    """Double integral over the target curve, in arc length, of
    |log|phi^{-1}(x) - phi^{-1}(y)||; the log singularity on the diagonal is
    integrated analytically over a band of K cells."""
    if not phi.target.rectifiable:
        raise ValueError("inverse Douglas energy needs a rectifiable target")
    hist = [(512 * 2 ** j, inverse_douglas_level(phi, 512 * 2 ** j)) for j in range(levels)]
    return report_from_history(hist, 2.0, threshold, notes="diagonal band integrated with the local linear model")


# -- Sobolev energy of fields ----------------------------------------------------------


def sobolev_value(field, p):
    return float(np.sum(field.mesh.areas * field.frobenius ** p))


def sobolev_energy(fields, p, threshold=ESCALATION) -> EnergyReport:
    """sum over elements of area * |Dh|_F^p for one field or a list of fields
    on nested meshes (finest last)."""
    if p < 1:
        raise ValueError("p must be at least 1")
    if not isinstance(fields, (list, tuple)):
        fields = [fields]
    hist = [(f.mesh.n_nodes, sobolev_value(f, p)) for f in fields]
    return report_from_history(hist, p, threshold)


# -- the disk integral of |g'|^{2-p} / |w - z|^p --------------------------------------


def condition_32_profile(g, p, omegas, n_rad=48, n_ang=96):
    """int_D |g'(z)|^{2-p} |w - z|^{-p} dA(z) for each boundary point w.

    Polar coordinates about w, with u = rho^{2-p} so the kernel becomes a
    constant; Gauss-Legendre in (beta, u). The disk seen from w is the half
    plane of directions with exit distance R(beta) = -2 Re(conj(w) e^{i beta}).
    """
    if not 1 <= p < 2:
        raise ValueError("p must lie in [1, 2)")
    xb, wb = leggauss(n_ang)
    xu, wu = leggauss(n_rad)
    q = 2.0 - p

    def one(w):
        w = complex(w)
        a0 = np.angle(w) + np.pi / 2
        beta = a0 + np.pi / 2 * (xb + 1)
        R = -2 * (np.conj(w) * np.exp(1j * beta)).real
        R = np.maximum(R, 0.0)
        umax = R ** q
        u = 0.5 * (xu[None, :] + 1) * umax[:, None]
        rho = u ** (1.0 / q)
        z = w + rho * np.exp(1j * beta)[:, None]
        z = z * np.minimum(1.0, (1 - 1e-15) / np.maximum(np.abs(z), 1e-300))
        if p == 1 and g.kind == "identity":
            f = np.ones(z.shape)
        else:
            f = np.abs(g.derivative(z)) ** q
        inner = 0.5 * umax * np.sum(wu[None, :] * f, axis=1) / q
        return float(np.pi / 2 * np.sum(wb * inner))

    return np.array(pmap(one, omegas))


def condition_32(g, p, omegas=None, n_rad=48, n_ang=96):
    if omegas is None:
        omegas = np.exp(TWO_PI * 1j * np.arange(64) / 64)
    return float(np.max(condition_32_profile(g, p, omegas, n_rad, n_ang)))


# -- Carleson boxes ---------------------------------------------------------------------


def _duffy_box(weight, eps, a0, a1, n):
    """Integral of weight * r over {1-eps < r < 1, alpha between a0 and a1},
    with a Duffy transform at the corner (r = 1, alpha = a0)."""
    x, w = leggauss(n)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    A = a1 - a0
    total = 0.0
    # unit square (X, Y) -> r = 1 - eps X, alpha = a0 + A Y; split along X = Y
    S, T = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w) * S
    for X, Y in ((S, S * T), (S * T, S)):
        r = 1 - eps * X
        z = r * np.exp(1j * (a0 + A * Y))
        total += np.sum(W * weight(z) * r)
    return total * eps * abs(A)


def box_measure(weight, eps, theta, singular_angle=0.0, n=40):
    """mu(S_eps(theta)) for mu = weight dA, S = {1-eps<r<1, |alpha-theta|<eps}."""
    lo, hi = theta - eps, theta + eps
    s = theta + np.angle(np.exp(1j * (singular_angle - theta)))
    split = min(max(s, lo), hi)
    total = 0.0
    if split > lo:
        total += _duffy_box(weight, eps, split, lo, n)
    if split < hi:
        total += _duffy_box(weight, eps, split, hi, n)
    return float(total)


def carleson_profile(weight, eps_grid, theta_grid, singular_angle=0.0, n=40):
    eps_grid = np.asarray(eps_grid, float)
    theta_grid = np.asarray(theta_grid, float)
    cells = [(e, t) for e in eps_grid for t in theta_grid]
    vals = pmap(lambda c: box_measure(weight, c[0], c[1], singular_angle, n) / c[0], cells)
    return np.array(vals).reshape(len(eps_grid), len(theta_grid))


def carleson_constant(weight, eps_grid, theta_grid, singular_angle=0.0, n=40):
    """sup over the grids of mu(S_eps(theta)) / eps."""
    return float(np.max(carleson_profile(weight, eps_grid, theta_grid, singular_angle, n)))
