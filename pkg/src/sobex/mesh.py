"""Triangle meshes for the source domains: the disk, the cusp domain and
rectangles. Nodes are complex numbers, triangles are counterclockwise."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import Delaunay


@dataclass(eq=False)
class Mesh:
    nodes: np.ndarray
    triangles: np.ndarray
    kind: str = "generic"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, complex)
        tri = np.asarray(self.triangles, int)
        p = self.nodes[tri]
        cr = ((p[:, 1] - p[:, 0]) * np.conj(p[:, 2] - p[:, 0])).imag
        # cross(b, c) = -Im(b conj c); flip clockwise triangles
        flip = cr > 0
        tri[flip] = tri[flip][:, [0, 2, 1]]
        self.triangles = tri

    @property
    def n_nodes(self):
        return len(self.nodes)

    @cached_property
    def areas(self):
        p = self.nodes[self.triangles]
        b, c = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (b.real * c.imag - b.imag * c.real)

    @cached_property
    def basis_gradients(self):
        """Gradients of the three barycentric functions per element, as complex
        numbers g_x + i g_y, shape (m, 3)."""
        p = self.nodes[self.triangles]
        A2 = 2 * self.areas[:, None]
        opp = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
        return 1j * opp / A2

    @cached_property
    def edges(self):
        t = self.triangles
        e = np.sort(np.r_[t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)
        return np.unique(e, axis=0)

    @cached_property
    def boundary(self):
        """Boundary node indices in counterclockwise order."""
        t = self.triangles
        directed = np.r_[t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]
        key = np.sort(directed, axis=1)
        _, inv, cnt = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        bd = directed[cnt[inv.ravel()] == 1]
        nxt = dict(zip(bd[:, 0].tolist(), bd[:, 1].tolist()))
        start = min(nxt)
        loop = [start]
        while True:
            n = nxt[loop[-1]]
            if n == start:
                break
            loop.append(n)
        return np.array(loop)

    @cached_property
    def is_boundary(self):
        m = np.zeros(self.n_nodes, bool)
        m[self.boundary] = True
        return m

    def h_max(self):
        e = self.edges
        return float(np.max(np.abs(self.nodes[e[:, 0]] - self.nodes[e[:, 1]])))


def disk_mesh(level: int, radius=1.0, center=0j) -> Mesh:
    """Concentric rings: 2^(level-1) rings, ring j carries 6j nodes."""
    if not 1 <= level <= 10:
        raise ValueError("mesh level must lie in [1, 10]")
    n = 2 ** (level - 1)
    pts = [np.zeros(1, complex)]
    for j in range(1, n + 1):
        k = np.arange(6 * j)
        off = 0.0 if j == n else 0.5 * (j % 2) / (6 * j)
        pts.append(j / n * np.exp(2j * np.pi * (k / (6 * j) + off)))
    z = np.concatenate(pts)
    tri = Delaunay(np.c_[z.real, z.imag]).simplices
    m = Mesh(center + radius * z, tri, "disk", {"level": level, "radius": radius, "center": center})
    return m


def rect_mesh(x0, x1, y0, y1, nx, ny) -> Mesh:
    x = np.linspace(x0, x1, nx + 1)
    y = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(x, y)
    z = (X + 1j * Y).ravel()
    idx = np.arange(z.size).reshape(ny + 1, nx + 1)
    a, b = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    c, d = idx[1:, 1:].ravel(), idx[1:, :-1].ravel()
    tri = np.r_[np.c_[a, b, c], np.c_[a, c, d]]
    return Mesh(z, tri, "rect")


def _zipper(A, angA, B, angB):
    """Triangulate the strip between two arcs given as node lists sorted by angle."""
    tri = []
    i = j = 0
    while i < len(A) - 1 or j < len(B) - 1:
        if j < len(B) - 1 and (i == len(A) - 1 or angB[j + 1] <= angA[i + 1]):
            tri.append((A[i], B[j], B[j + 1]))
            j += 1
        else:
            tri.append((A[i], B[j], A[i + 1]))
            i += 1
    return tri


def cusp_mesh(s: float, level: int = 3, octaves=None, per_octave=None, columns=None) -> Mesh:
    """Mesh of X_s = {|x|^s < y < 1} joined with the half disk above y = 1.

    The spike is meshed in the stretched coordinates (xi, y) with x = xi *
    y^(1/s): geometric y-levels, uniform xi-columns, and a fan at the tip.
    The cap uses half rings around i whose end nodes match the top row of
    the spike. Refining the level deepens and sharpens the spike mesh.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    octaves = octaves if octaves is not None else 2 * level + 2
    per_octave = per_octave if per_octave is not None else 2 + 2 * level
    columns = columns if columns is not None else 2 * (level + 2)
    if columns % 2:
        columns += 1
    K = int(round(octaves * per_octave))
    y = 2.0 ** (-np.arange(K + 1) / per_octave)
    xi = np.linspace(-1, 1, columns + 1)
    grid = xi[None, :] * (y[:, None] ** (1.0 / s)) + 1j * y[:, None]
    nodes = [grid.ravel()]
    idx = np.arange(grid.size).reshape(K + 1, columns + 1)
    tri = []
    for m in range(K):
        up, lo = idx[m], idx[m + 1]
        for j in range(columns):
            a, b, c, d = lo[j], lo[j + 1], up[j + 1], up[j]
            za, zb, zc, zd = grid[m + 1, j], grid[m + 1, j + 1], grid[m, j + 1], grid[m, j]
            if abs(zc - za) <= abs(zd - zb):
                tri += [(a, b, c), (a, c, d)]
            else:
                tri += [(a, b, d), (b, c, d)]
    apex = grid.size
    nodes.append(np.array([0j]))
    tri += [(apex, idx[K, j], idx[K, j + 1]) for j in range(columns)]
    # cap: ring r around i has its end nodes on the top row at x = +-r/M
    M = columns // 2
    nxt = apex + 1
    prev_ids = [idx[0, M]]
    prev_ang = [0.0]
    for r in range(1, M + 1):
        n_r = max(2, int(round(np.pi * r)))
        ang = np.pi * np.arange(n_r + 1) / n_r
        ids = [idx[0, M + r]]
        inner = 1j + (r / M) * np.exp(1j * ang[1:-1])
        ids += list(range(nxt, nxt + len(inner)))
        nxt += len(inner)
        nodes.append(inner)
        ids.append(idx[0, M - r])
        if r == 1:
            tri += [(prev_ids[0], ids[l], ids[l + 1]) for l in range(n_r)]
        else:
            tri += _zipper(prev_ids, prev_ang, ids, list(ang))
        prev_ids, prev_ang = ids, list(ang)
    z = np.concatenate(nodes)
    return Mesh(z, np.array(tri), "cusp", {"s": s, "level": level, "y_min": float(y[-1]),
                                           "octaves": octaves, "per_octave": per_octave, "columns": columns})
