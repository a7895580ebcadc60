"""
Modified energy increments for growing cutoffs
==============================================

``E(I_N u)`` is not conserved, but its change over a local window should
shrink as the cutoff N grows. One trajectory serves all cutoffs because the
window length is the same for each of them here.

Takes about half a minute.
"""

from fnls_lab.basis import build_basis
from fnls_lab.config import SimConfig
from fnls_lab.estimates import loglog_slope
from fnls_lab.imethod import increment_bound_exponents, increment_experiment, max_increment

cfg = SimConfig(alpha=1.0, s=0.9, n_max=96, dt=2.5e-5, windows=8)
basis = build_basis(cfg.n_max)
Ns = [8, 16, 32, 64]
recs = increment_experiment(cfg, basis, Ns)
peaks = [max_increment(recs, N) for N in Ns]
for N, p in zip(Ns, peaks):
    print(f"N={N:3d}: window {recs[0].delta:.3f}, max |increment| {p:.2e}")
print("log-log slope:", round(loglog_slope(Ns, peaks), 3))

print("\npredicted N-exponents of the increment terms at alpha=1, s=0.9:")
for label, e in increment_bound_exponents(1.0, 0.9):
    print(f"  {e:+.3f}  {label}")
