"""
Regularity thresholds and the growth exponent
=============================================

Tabulate s_1..s_5 over alpha, and evaluate the growth exponent p as
written. Note that its first branch is negative at alpha = 1 just above
s_*, so p is reported but not interpreted.
"""

import numpy as np

from fnls_lab.thresholds import alpha_grid, growth_exponent, s_star, threshold_curve

rows = threshold_curve(alpha_grid(0.67, 1.0, 11))
print(" alpha     s1      s2      s3      s4      s5     s_*")
for r in rows:
    print(f"{r.alpha:.3f}  " + "  ".join(f"{v:.4f}" for v in r.row()[1:]))

for s in (s_star(1.0) + 0.005, 0.9, 0.95):
    g = growth_exponent(1.0, s)
    print(f"s={s:.4f}: p={g.p:+.4f} (branches {g.branch1:+.4f}, {g.branch2:+.4f}),"
          f" time exponents {g.time_exponent_printed:+.4f} / {g.time_exponent_derived:+.4f}")

gap = min(a - s_star(a) for a in np.linspace(2 / 3 + 1e-3, 1, 1000))
print("min over alpha of alpha - s_*:", gap)
