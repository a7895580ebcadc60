"""
Measured constants for the bilinear and counting estimates
==========================================================

Near-resonant pair counts, worst-over-seeds bilinear norms of free
solutions, and the tau-convolution tail.
"""

import numpy as np

from fnls_lab.cli import bilinear_basis
from fnls_lab.estimates import bilinear_exponent_fit, convolution_tail_scan, counting_scan
from fnls_lab.special_fn import BesselZeroTable

zeros = BesselZeroTable.build(200)
for alpha in (0.5, 0.75, 1.0):
    sc = counting_scan(alpha, 128, 16, zeros)
    print(f"alpha={alpha}: max #Lambda = {sc.max_count} at tau={sc.tau_at_max:.2f}, ratio to N2 {sc.ratio:.3f}")

basis = bilinear_basis(32)
for alpha in (0.75, 1.0):
    fit = bilinear_exponent_fit(alpha, 32, [2, 4, 8, 16, 32], basis, samples_per_point=20)
    print(f"alpha={alpha}: worst-case slope {fit.slope:.3f}, mean slope {fit.mean_slope:.3f}")

# the ratio stays bounded but climbs toward its limit 2 int <t>^-gamma dt
for d, r in convolution_tail_scan(1.1, [10, 100, 1000, 10000]):
    print(f"|k1-k2|={d:>7g}: ratio {r:.3f}")
