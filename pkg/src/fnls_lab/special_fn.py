"""Bessel functions J0, J1 and the positive zeros of J0.

Three evaluation regimes, all vectorised over numpy arrays:

* ``x < 3``: the ascending power series;
* ``3 <= x < 25``: Bessel's integral ``J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt``
  summed with the trapezoid rule (spectrally accurate, the integrand is periodic);
* ``x >= 25``: Hankel's asymptotic expansion.

The power series cancels badly past x ~ 3, and the asymptotic series cannot
reach 1e-13 much below x ~ 25 (its smallest term is about exp(-2x)), hence
the middle regime.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SERIES_MAX = 3.0
ASYMPTOTIC_MIN = 25.0

_SERIES_TERMS = 40
_TRAPEZOID_PANELS = 96
_HANKEL_TERMS = 18


def _series(order, x):
    q = -0.25 * x * x
    term = np.ones_like(x) if order == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + order))
        total += term
    return total


@lru_cache(maxsize=None)
def _trapezoid_nodes():
    theta = np.linspace(0.0, np.pi, _TRAPEZOID_PANELS + 1)
    w = np.full(theta.size, np.pi / _TRAPEZOID_PANELS)
    w[0] *= 0.5
    w[-1] *= 0.5
    return theta, w / np.pi


def _integral(order, x):
    theta, w = _trapezoid_nodes()
    phase = order * theta[None, :] - x[:, None] * np.sin(theta)[None, :]
    return np.cos(phase) @ w


@lru_cache(maxsize=None)
def _hankel_coefficients(order):
    mu = 4.0 * order * order
    a = [1.0]
    for k in range(1, 2 * _HANKEL_TERMS):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


def _hankel(order, x):
    a = _hankel_coefficients(order)
    inv = 1.0 / x
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    # Horner in 1/x^2 from the tail
    inv2 = inv * inv
    for k in reversed(range(_HANKEL_TERMS)):
        sign = -1.0 if k % 2 else 1.0
        p = p * inv2 + sign * a[2 * k]
        q = q * inv2 + sign * a[2 * k + 1]
    q *= inv
    c, s = np.cos(x), np.sin(x)
    # cos/sin of x - (2*order + 1) pi/4 without forming the shifted argument
    if order == 0:
        cchi, schi = (c + s), (s - c)
    else:
        cchi, schi = (s - c), -(s + c)
    cchi *= np.sqrt(0.5)
    schi *= np.sqrt(0.5)
    return np.sqrt(2.0 / (np.pi * x)) * (p * cchi - q * schi)


def bessel_j(order, x):
    """Bessel function of the first kind ``J_order(x)`` for order 0 or 1.

    Parameters
    ----------
    order : int
        0 or 1.
    x : float or array_like
        Nonnegative arguments.

    Returns
    -------
    float or ndarray
        Same shape as ``x``.
    """
    if order not in (0, 1):
        raise ValueError(f"only orders 0 and 1 are supported, got {order!r}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise ValueError("bessel_j requires finite nonnegative arguments")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    small = flat < SERIES_MAX
    large = flat >= ASYMPTOTIC_MIN
    mid = ~(small | large)
    if small.any():
        out[small] = _series(order, flat[small])
    if mid.any():
        out[mid] = _integral(order, flat[mid])
    if large.any():
        out[large] = _hankel(order, flat[large])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def mcmahon(n):
    """McMahon's large-n expansion for the n-th zero of J0 (first four terms)."""
    beta = (np.asarray(n, dtype=float) - 0.25) * np.pi
    b2 = 1.0 / (beta * beta)
    return beta + (1.0 / 8.0 + b2 * (-31.0 / 384.0 + b2 * 3779.0 / 15360.0)) / beta


def bessel_zeros(n_max, max_iter=50):
    """First ``n_max`` positive zeros of J0 by Newton iteration from McMahon seeds."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    z = mcmahon(np.arange(1, n_max + 1))
    for _ in range(max_iter):
        step = bessel_j(0, z) / bessel_j(1, z)
        z = z + step
        if np.all(np.abs(step) <= 4 * np.spacing(z)):
            return z
    raise RuntimeError("Newton iteration for J0 zeros did not converge; evaluator broken?")


def bessel_zero(n):
    """The n-th positive zero of J0 (n >= 1)."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    return float(bessel_zeros(int(n))[-1])


@dataclass(frozen=True)
class BesselZeroTable:
    """Immutable table ``z[0] < z[1] < ...`` of the first ``n_max`` zeros of J0.

    Index 0 holds z_1; use :meth:`zero` for 1-based access.
    """

    z: np.ndarray

    @classmethod
    def build(cls, n_max):
        z = bessel_zeros(n_max)
        z.setflags(write=False)
        return cls(z)

    @property
    def n_max(self):
        return self.z.size

    def zero(self, n):
        return float(self.z[n - 1])

    def __len__(self):
        return self.z.size
