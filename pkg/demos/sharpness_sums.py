"""Lower bounds behind the two sharpness examples, and the modulus of
continuity of the logarithmic maps Phi_tau at their boundary singularity.

Both lower-bound series grow like log log N, which is slow but unbounded.
The modulus-of-continuity integral of Phi_tau diverges only for tau <= 1/2.
"""
import numpy as np

from sobex.conformal import phi_tau
from sobex.counterexamples import cusp_lower_bound, divergence_certificate, spiral_lower_bound
from sobex.hyperbolic import moc_report

levels = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
for name, f in [("spiral", spiral_lower_bound), ("cusp p=1.5", lambda n: cusp_lower_bound(n, 1.5)),
                ("basel", lambda n: float(np.sum(1.0 / np.arange(1, n + 1) ** 2)))]:
    c = divergence_certificate(f, levels)
    print(f"{name:11s} sums " + " ".join(f"{v:.4f}" for v in c.sums)
          + f"  certified {c.certified}  loglog r^2 {c.loglog_r2:.4f}")

for tau in (0.3, 0.5, 1.0):
    rep = moc_report(phi_tau(tau), 1 + 0j, 0.5, 1e-2, halvings=8)
    v = np.array([h[1] for h in rep.history])
    print(f"tau = {tau}: integral by cutoff " + " ".join(f"{x:.4f}" for x in v)
          + f"  flagged divergent: {rep.divergence_flag}")
