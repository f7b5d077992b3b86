"""Quasihyperbolic distance on a lattice graph, in the disk and in cusp domains.

In the disk the distance from the centre grows like log 1/dist. Near the tip
of the cusp domain {y > |x|^s} it grows like a power dist^-(1-s).
"""
import time

import numpy as np

from sobex.geometry import make_disk
from sobex.hyperbolic import QhGrid, cusp_approach, disk_hyperbolic, growth_exponent

t = time.perf_counter()
grid = QhGrid(make_disk(), 1 / 128, 0j)
for r in (0.5, 0.75, 0.9, 0.95):
    h = grid.distance(r + 0j)
    print(f"|z| = {r:4.2f}  lattice h = {h:.4f}  log 1/(1-r) = {np.log(1 / (1 - r)):.4f}"
          f"  log 1/(1-r^2) = {float(disk_hyperbolic(r)):.4f}")
print(f"disk lattice with {grid.n_nodes} nodes, {time.perf_counter() - t:.1f} s")

s = 0.5
X, pts = cusp_approach(s)
x0 = 1.2j
t = time.perf_counter()
grid = QhGrid(X, 1 / 256, x0, levels=6, path=np.r_[x0, pts])
fit = growth_exponent(X, x0, pts, grid=grid)
print(f"cusp s = {s}: fitted growth exponent {fit.slope:.3f}, expected {1 - s:.1f}"
      f" ({time.perf_counter() - t:.1f} s)")
