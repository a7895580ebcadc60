"""
Bessel zeros and the radial eigenbasis
======================================

The radial Dirichlet eigenfunctions of the unit disk are ``J0(z_n r)``
with ``z_n`` the zeros of J0. This script builds the zero table, compares
it with the two-term large-n expansion, and checks the basis Gram matrix.
"""

import numpy as np

from fnls_lab.basis import build_basis, lp_norm
from fnls_lab.special_fn import BesselZeroTable

# zeros are spaced by ~pi, offset by a quarter period
table = BesselZeroTable.build(1000)
n = np.arange(1, 1001)
beta = (n - 0.25) * np.pi
resid = table.z - (beta + 1 / (8 * beta))
print("z_1, z_2      :", table.z[:2])
print("max |z - 2 term| * n^3 :", np.max(np.abs(resid) * n**3))

# the Gram matrix under the normalized measure dL
basis = build_basis(128, 1024)
print("Gram deviation (128 modes, 1024 nodes):", basis.gram_deviation())

# L^p norms of single modes: bounded for p < 4, growing like n^(1/2 - 2/p) above
for p in (3, 6):
    vals = [lp_norm(basis.mode(k), p, basis) for k in (8, 16, 32, 64, 128)]
    print(f"||e_n||_{p} for n = 8..128:", np.round(vals, 4))
