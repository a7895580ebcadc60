"""Coefficient-space radial fields ``u = sum_n c_n e_n``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpectralField:
    """Complex coefficients ``c[n-1]`` of e_n, n = 1..n_max."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        if c.ndim != 1:
            raise ValueError("coefficients must be a 1-d array")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "c", c)

    @property
    def n_max(self):
        return self.c.size

    @classmethod
    def zeros(cls, n_max):
        return cls(np.zeros(n_max, dtype=complex))

    @classmethod
    def unit(cls, n, n_max, value=1.0):
        c = np.zeros(n_max, dtype=complex)
        c[n - 1] = value
        return cls(c)

    def __add__(self, other):
        return SpectralField(self.c + other.c)

    def __sub__(self, other):
        return SpectralField(self.c - other.c)

    def __mul__(self, scalar):
        return SpectralField(self.c * scalar)

    __rmul__ = __mul__

    def l2(self):
        return float(np.linalg.norm(self.c))


def _check(field, basis):
    if field.n_max > basis.n_max:
        raise ValueError(f"field has {field.n_max} modes, basis only {basis.n_max}")


def synthesize(field, basis):
    """Samples ``u(r_q)`` at the quadrature nodes."""
    _check(field, basis)
    return field.c @ basis.values[: field.n_max]


def analyze(samples, basis, n_max=None):
    """Project node samples onto e_1..e_{n_max}: ``c_n = <u, e_n>``."""
    samples = np.asarray(samples)
    if samples.shape[-1] != basis.quad_order:
        raise ValueError("sample array must match the number of quadrature nodes")
    n_max = basis.n_max if n_max is None else n_max
    if n_max > basis.n_max:
        raise ValueError("requested more modes than the basis holds")
    return SpectralField(basis.values[:n_max] @ (basis.weights * samples))


def _zpow(z, n, gamma):
    return z[:n] ** gamma


def sobolev_norm(field, s, zeros):
    """``(sum z_n^(2s) |c_n|^2)^(1/2)``."""
    w = _zpow(zeros.z, field.n_max, 2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(field.c) ** 2)))


def apply_fractional(field, gamma, zeros):
    """``sqrt(-Delta)^gamma``: multiply c_n by z_n^gamma."""
    return SpectralField(_zpow(zeros.z, field.n_max, gamma) * field.c)


def cubic_nonlinearity(field, basis, return_residual=False):
    """Galerkin projection of ``|u|^2 u`` onto the field's modes.

    With ``return_residual`` also returns the L^2(dL) norm of the part of
    ``|u|^2 u`` lying outside the retained modes (aliasing residual).
    """
    if basis.quad_order < 4 * field.n_max:
        raise ValueError("basis under-resolved for the cubic term (need quad_order >= 4 n_max)")
    u = synthesize(field, basis)
    f = np.abs(u) ** 2 * u
    out = analyze(f, basis, field.n_max)
    if not return_residual:
        return out
    total = float(np.sum(basis.weights * np.abs(f) ** 2))
    return out, float(np.sqrt(max(total - out.l2() ** 2, 0.0)))
