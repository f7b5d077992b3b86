"""Extend a random boundary homeomorphism of the circle onto a regular pentagon.

The composed extension first extends the map into the disk harmonically and
then pushes the disk radially onto the pentagon. The radial map creases along
the rays to the corners, so elements straddling a crease fold unless the mesh
is split along the crease preimages first.
"""
from pathlib import Path

import numpy as np

from sobex.boundary_maps import random_monotone_map
from sobex.extension import composed_extension, harmonic_extend, homeomorphy_check
from sobex.geometry import make_regular_polygon
from sobex.io import atomic_write, field_svg
from sobex.mesh import disk_mesh

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

Y = make_regular_polygon(5)
mesh = disk_mesh(5)
phi = random_monotone_map(np.random.default_rng(0)).with_target(Y.boundary)

fields = {
    "harmonic": harmonic_extend(phi, mesh),
    "composed": composed_extension(phi, mesh),
    "composed_split": composed_extension(phi, mesh, split_kinks=True),
}
for name, f in fields.items():
    rep = homeomorphy_check(f)
    print(f"{name:15s} elements {rep['n_elements']:5d}  positive Jacobian {rep['jacobian_sign_fraction']:.4f}"
          f"  edge crossings {rep['injectivity_violations']}  trace error {f.trace_error():.1e}")
    atomic_write(out / f"pentagon_{name}.svg", field_svg(f))

print("image meshes written to", out)
