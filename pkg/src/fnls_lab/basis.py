"""Radial Dirichlet eigenbasis of the unit disk with a Gauss-Legendre rule.

All spatial integrals use the normalised measure ``dL = r dr dtheta / (4 pi)``,
so that for radial ``f``::

    int f dL = 1/2 int_0^1 f(r) r dr

and the eigenfunctions ``e_n(r) = J0(z_n r) / ||J0(z_n .)||`` are orthonormal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .special_fn import BesselZeroTable, bessel_j

GRAM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BasisTable:
    """Sampled eigenbasis.

    Attributes
    ----------
    zeros : BesselZeroTable
        z_1 .. z_{n_max}.
    nodes : ndarray, shape (Q,)
        Quadrature abscissae in (0, 1), increasing.
    weights : ndarray, shape (Q,)
        Weights for ``int f dL``; they already contain the factor ``r/2``.
    values : ndarray, shape (n_max, Q)
        ``values[n-1, q] = e_n(nodes[q])``.
    norms : ndarray, shape (n_max,)
        ``||J0(z_n .)||_{L^2(dL)}``, computed by quadrature.
    """

    zeros: BesselZeroTable
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    norms: np.ndarray

    @property
    def n_max(self):
        return self.values.shape[0]

    @property
    def quad_order(self):
        return self.nodes.size

    @property
    def z(self):
        return self.zeros.z

    def mode(self, n):
        """Samples of e_n at the nodes (1-based n)."""
        if not 1 <= n <= self.n_max:
            raise IndexError(f"mode {n} outside 1..{self.n_max}")
        return self.values[n - 1]

    def gram(self):
        wv = self.values * self.weights
        return wv @ self.values.T

    def gram_deviation(self):
        return float(np.abs(self.gram() - np.eye(self.n_max)).max())

    def evaluate(self, n, r):
        """e_n at arbitrary radii (uses the cached normalisation)."""
        r = np.asarray(r, dtype=float)
        return bessel_j(0, self.zeros.zero(n) * r) / self.norms[n - 1]


def radial_rule(quad_order):
    """Gauss-Legendre nodes on (0, 1) and weights for the measure dL."""
    x, w = roots_legendre(quad_order)
    r = 0.5 * (x + 1.0)
    return r, 0.25 * w * r


def build_basis(n_max, quad_order=None, zeros=None, check=True):
    """Sample the first ``n_max`` normalised eigenfunctions.

    ``quad_order`` defaults to ``4 * n_max`` (enough to integrate products of
    four eigenfunctions exactly up to rounding). Raises ``ValueError`` if the
    Gram matrix deviates from the identity by more than ``GRAM_TOLERANCE``.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if quad_order is None:
        quad_order = 4 * n_max
    if quad_order < 4 * n_max:
        raise ValueError(f"quad_order={quad_order} < 4*n_max={4 * n_max}")
    if zeros is None or zeros.n_max < n_max:
        zeros = BesselZeroTable.build(n_max)
    z = zeros.z[:n_max]
    r, w = radial_rule(quad_order)
    raw = bessel_j(0, np.outer(z, r))
    norms = np.sqrt((raw * raw) @ w)
    values = raw / norms[:, None]
    for a in (r, w, values, norms):
        a.setflags(write=False)
    basis = BasisTable(zeros=zeros, nodes=r, weights=w, values=values, norms=norms)
    if check:
        dev = basis.gram_deviation()
        if dev > GRAM_TOLERANCE:
            raise ValueError(f"quadrature under-resolved: Gram deviation {dev:.3e}")
    return basis


def inner_product(f, g, basis):
    """``int f conj(g) dL`` from samples at the basis nodes."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape[-1] != basis.quad_order or g.shape[-1] != basis.quad_order:
        raise ValueError("sample arrays must match the number of quadrature nodes")
    return complex(np.sum(basis.weights * f * np.conj(g)))


def lp_norm(f, p, basis):
    """``(int |f|^p dL)^(1/p)``; ``p = inf`` gives the maximum over the nodes."""
    if p < 1:
        raise ValueError("p must be >= 1")
    f = np.abs(np.asarray(f))
    if f.shape[-1] != basis.quad_order:
        raise ValueError("sample array must match the number of quadrature nodes")
    if np.isinf(p):
        return float(f.max())
    return float(np.sum(basis.weights * f**p) ** (1.0 / p))


def quadrilinear_integral(n0, n1, n2, n3, basis):
    """``int e_n0 e_n1 e_n2 e_n3 dL`` by quadrature."""
    for n in (n0, n1, n2, n3):
        if not 1 <= n <= basis.n_max:
            raise IndexError(f"mode {n} outside 1..{basis.n_max}")
    v = basis.values
    return float(np.sum(basis.weights * v[n0 - 1] * v[n1 - 1] * v[n2 - 1] * v[n3 - 1]))
