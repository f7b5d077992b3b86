"""Boundary energies of circle maps under refinement.

A homeomorphism with finite energy settles as the excluded diagonal band
shrinks; a trace with jumps keeps growing by a fixed amount per halving.
"""
import numpy as np

from sobex.boundary_maps import cascade_map, identity_map, knot_map
from sobex.energy import douglas, p_douglas

TWO_PI = 2 * np.pi


def two_jumps(w=1e-9):
    a = [0, np.pi / 2 - w, np.pi / 2 + w, 3 * np.pi / 2 - w, 3 * np.pi / 2 + w, TWO_PI]
    b = [0, w, np.pi, np.pi + w, TWO_PI - w, TWO_PI]
    return knot_map(np.c_[a, b])


for name, phi in [("identity", identity_map()), ("cascade 0.7", cascade_map(0.7, depth=14)),
                  ("two jumps", two_jumps())]:
    rep = douglas(phi, levels=6)
    vals = np.array([v for _, v in rep.history])
    print(f"{name:12s} Douglas by level: " + " ".join(f"{v:9.3f}" for v in vals))
    print(f"{'':12s} increments:       " + " ".join(f"{d:9.3f}" for d in np.diff(vals)))

print(f"identity value vs 4 pi^2 = {4 * np.pi ** 2:.3f}")

# the identity preserves chords, so its p-Douglas value does not depend on p
for name, phi in [("identity", identity_map()), ("cascade 0.7", cascade_map(0.7, depth=14))]:
    for p in (2.0, 3.0):
        rep = p_douglas(phi, p, levels=5)
        print(f"p-Douglas of {name}, p={p}: {rep.value:.4f}  flagged divergent: {rep.divergence_flag}")
