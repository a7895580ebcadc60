"""Measured constants for the analytic estimates.

Lattice counts near the phase surface, bilinear L^2 norms of products of
free solutions, eigenfunction product integrals and L^p norms, and the
tau-convolution tail integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import roots_legendre

from .basis import lp_norm, quadrilinear_integral
from .config import make_rng
from .field import SpectralField, apply_fractional
from .parallel import ordered_map

TIME_NODES_PER_PANEL = 16
PANEL_PHASE = 20.0
BILINEAR_TOL = 1e-8
MAX_DOUBLINGS = 6


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points for a slope")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def block_modes(N, zeros):
    """1-based indices n with ``z_n`` in ``[N, 2N]``."""
    if 2 * N > zeros.z[-1]:
        raise ValueError(f"block [{N}, {2 * N}] exceeds the zero table (z_max={zeros.z[-1]:.4g})")
    z = zeros.z
    return np.nonzero((z >= N) & (z <= 2 * N))[0] + 1


# ---------------------------------------------------------------- counting


@dataclass(frozen=True)
class LambdaCount:
    N1: float
    N2: float
    tau: float
    alpha: float
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")


def _phases(N, alpha, zeros):
    return zeros.z[block_modes(N, zeros) - 1] ** (2 * alpha)


def enumerate_lambda(N1, N2, tau, alpha, zeros):
    """Brute-force ``#{(n1, n2): z_n1 in [N1,2N1], z_n2 in [N2,2N2], |z_n1^2a + z_n2^2a - tau| <= 1/2}``."""
    a1 = _phases(N1, alpha, zeros)
    a2 = _phases(N2, alpha, zeros)
    sums = a1[:, None] + a2[None, :]
    return LambdaCount(N1, N2, float(tau), alpha, int(np.count_nonzero(np.abs(sums - tau) <= 0.5)))


@dataclass(frozen=True)
class CountingScan:
    """Sweep summary: ``max_count`` is attained at ``tau_at_max``; ``fiber_max`` bounds n1 per (tau, n2)."""

    alpha: float
    N1: float
    N2: float
    max_count: int
    tau_at_max: float
    fiber_max: int
    n_tau: int

    @property
    def ratio(self):
        return self.max_count / self.N2


def tau_sweep(alpha, N1, N2, zeros, tau_resolution=0.25):
    """Grid covering all attainable phase sums with spacing <= ``tau_resolution``."""
    if not 0 < tau_resolution <= 0.25:
        raise ValueError("tau_resolution must lie in (0, 1/4]")
    a1 = _phases(N1, alpha, zeros)
    a2 = _phases(N2, alpha, zeros)
    lo, hi = a1[0] + a2[0], a1[-1] + a2[-1]
    n = max(1, math.ceil((hi - lo) / tau_resolution))
    return np.linspace(lo, hi, n + 1)


def counting_scan(alpha, N1, N2, zeros, tau_resolution=0.25, return_counts=False):
    """Supremum of ``#Lambda_{N1,N2,tau}`` over a tau sweep, and the largest single-n2 fiber.

    With ``return_counts`` also returns ``(taus, counts)``.
    """
    a1 = np.sort(_phases(N1, alpha, zeros))
    a2 = _phases(N2, alpha, zeros)
    taus = tau_sweep(alpha, N1, N2, zeros, tau_resolution)
    counts = np.zeros(taus.size, dtype=np.int64)
    fiber = 0
    for x in a2:
        # admissible n1 for this n2: a1 in [tau - x - 1/2, tau - x + 1/2]
        k = np.searchsorted(a1, taus - x + 0.5, side="right") - np.searchsorted(a1, taus - x - 0.5, side="left")
        counts += k
        fiber = max(fiber, int(k.max()))
    i = int(np.argmax(counts))
    scan = CountingScan(alpha, N1, N2, int(counts[i]), float(taus[i]), fiber, taus.size)
    return (scan, taus, counts) if return_counts else scan


# ---------------------------------------------------------------- bilinear


@dataclass(frozen=True)
class BilinearSample:
    alpha: float
    N1: float
    N2: float
    seed: int
    norm: float

    COLUMNS = ("alpha", "N1", "N2", "seed", "norm")

    def __post_init__(self):
        if not self.norm >= 0:
            raise ValueError("norm must be nonnegative")

    def row(self):
        return [self.alpha, self.N1, self.N2, self.seed, self.norm]


def _time_rule(panels):
    x, w = roots_legendre(TIME_NODES_PER_PANEL)
    h = 1.0 / panels
    left = np.arange(panels) * h
    t = (left[:, None] + 0.5 * h * (x + 1.0)[None, :]).ravel()
    return t, np.tile(0.5 * h * w, panels)


def _min_panels(c1, c2, alpha, zeros):
    lam = zeros.z ** (2 * alpha)
    top = max(lam[np.nonzero(c1)[0]].max(initial=0.0), 0.0) + max(lam[np.nonzero(c2)[0]].max(initial=0.0), 0.0)
    # |S u1 S u2|^2 oscillates at differences of phase sums, at most 2 * top
    return max(2, math.ceil(2.0 * top / PANEL_PHASE))


def _bilinear_at(c1, c2, lam, values, weights, panels, chunk=2048):
    t, tw = _time_rule(panels)
    total = 0.0
    for i in range(0, t.size, chunk):
        ph = np.exp(-1j * np.outer(t[i : i + chunk], lam))
        prod = ((ph * c1) @ values) * ((ph * c2) @ values)
        total += float(np.abs(prod) ** 2 @ weights @ tw[i : i + chunk])
    return math.sqrt(max(total, 0.0))


def free_bilinear_norm(u1, u2, alpha, basis, time_samples=None, tol=BILINEAR_TOL):
    """``(int_0^1 ||S(t)u1 S(t)u2||^2_{L^2(dL)} dt)^(1/2)``.

    Composite Gauss-Legendre in time (16 nodes per panel). ``time_samples``
    sets the starting node count; by default panels span a phase change of
    about 20 at the fastest frequency. The panel count doubles until two
    successive values agree to ``tol`` (relative, floor 1).
    """
    n = max(u1.n_max, u2.n_max)
    if n > basis.n_max:
        raise ValueError("fields exceed the basis")
    if basis.quad_order < 4 * n:
        raise ValueError("basis under-resolved for products (need quad_order >= 4 n_max)")
    c1 = np.pad(u1.c, (0, n - u1.n_max))
    c2 = np.pad(u2.c, (0, n - u2.n_max))
    if not (np.any(c1) and np.any(c2)):
        return 0.0
    need = _min_panels(c1, c2, alpha, basis.zeros)
    if time_samples is None:
        panels = need
    else:
        panels = math.ceil(time_samples / TIME_NODES_PER_PANEL)
        if panels < need:
            raise ValueError(
                f"time grid under-resolved: {time_samples} samples, need >= {need * TIME_NODES_PER_PANEL}"
            )
    lam = basis.z[:n] ** (2 * alpha)
    values = basis.values[:n]
    prev = _bilinear_at(c1, c2, lam, values, basis.weights, panels)
    for _ in range(MAX_DOUBLINGS):
        panels *= 2
        cur = _bilinear_at(c1, c2, lam, values, basis.weights, panels)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ValueError("time quadrature did not converge; increase time_samples")


def random_block_field(N, zeros, rng, n_max):
    """Complex Gaussian coefficients on the block ``z_n in [N, 2N]``, unit L^2 norm."""
    modes = block_modes(N, zeros)
    if modes[-1] > n_max:
        raise ValueError("block exceeds n_max")
    c = np.zeros(n_max, dtype=complex)
    c[modes - 1] = rng.standard_normal(modes.size) + 1j * rng.standard_normal(modes.size)
    return SpectralField(c / np.linalg.norm(c))


def _bilinear_task(args):
    alpha, N1, N2, seed, basis, derivative = args
    rng = make_rng(seed, stream=int(round(N2 * 1000)))
    n = basis.n_max
    u1 = random_block_field(N1, basis.zeros, rng, n)
    u2 = random_block_field(N2, basis.zeros, rng, n)
    if derivative:
        u1 = apply_fractional(u1, 1.0, basis.zeros)
    return BilinearSample(alpha, N1, N2, seed, free_bilinear_norm(u1, u2, alpha, basis))


@dataclass(frozen=True)
class BilinearFit:
    """Slopes in log N2 of the worst-over-seeds and the seed-averaged norms."""

    alpha: float
    N1: float
    N2_list: tuple
    worst: tuple
    mean: tuple
    slope: float
    mean_slope: float
    samples: tuple


def bilinear_exponent_fit(alpha, N1, N2_list, basis, samples_per_point=20, seed=0, derivative=False, workers=1):
    """Fit the N2 exponent of the free bilinear norm.

    For each N2, ``samples_per_point`` seeds ``seed, seed+1, ...`` draw unit
    L^2 random data on the two blocks; the slope is taken from the maximum
    over seeds. ``derivative`` applies ``sqrt(-Delta)`` to the high-frequency
    factor first.
    """
    N2_list = [float(x) for x in N2_list]
    if len(N2_list) < 3:
        raise ValueError("need at least three N2 values")
    if max(N2_list) > N1:
        raise ValueError("N2 must not exceed N1")
    for a, b in zip(N2_list, N2_list[1:]):
        if not math.isclose(b, 2 * a):
            raise ValueError("N2_list must be dyadic")
    tasks = [(alpha, N1, N2, seed + k, basis, derivative) for N2 in N2_list for k in range(samples_per_point)]
    samples = ordered_map(_bilinear_task, tasks, workers)
    worst, mean = [], []
    for i in range(len(N2_list)):
        block = [s.norm for s in samples[i * samples_per_point : (i + 1) * samples_per_point]]
        worst.append(max(block))
        mean.append(float(np.mean(block)))
    return BilinearFit(
        alpha,
        N1,
        tuple(N2_list),
        tuple(worst),
        tuple(mean),
        loglog_slope(N2_list, worst),
        loglog_slope(N2_list, mean),
        tuple(samples),
    )


# ---------------------------------------------------------- eigenfunctions


@dataclass(frozen=True)
class WeakInteraction:
    n0: int
    n1: int
    n2: int
    n3: int
    B: float
    ratio: float

    COLUMNS = ("n0", "n1", "n2", "n3", "B", "ratio")

    def row(self):
        return [self.n0, self.n1, self.n2, self.n3, self.B, self.ratio]


def weak_interaction_scan(n0_list, basis, n2=4, n3=4, symmetric=False):
    """``B = int e_n0 e_n1 e_n2 e_n3 dL`` over a scan with ``n1 = n0/4``.

    Default ratio ``|B| (n0 - n1)^2 / (n2 n3)``. With ``symmetric`` the roles
    change to ``n3 = n0/4``, ``n1 = n2`` fixed, and the ratio
    ``|B| n0^2 / (n1 n2)``.
    """
    rows = []
    for n0 in n0_list:
        if symmetric:
            a, b, c, d = n0, n2, n2, n0 // 4
            B = quadrilinear_integral(a, b, c, d, basis)
            ratio = abs(B) * a**2 / (b * c)
        else:
            a, b, c, d = n0, n0 // 4, n2, n3
            B = quadrilinear_integral(a, b, c, d, basis)
            ratio = abs(B) * (a - b) ** 2 / (c * d)
        rows.append(WeakInteraction(a, b, c, d, B, ratio))
    return rows


def lp_growth_profile(n, p):
    """Expected size of ``||e_n||_{L^p}``: 1 (p<4), log(n)^(1/4) (p=4), n^(1/2-2/p) (p>4)."""
    if p < 4:
        return 1.0
    if p == 4:
        return math.log(max(n, 2)) ** 0.25
    return n ** (0.5 - 2.0 / p)


@dataclass(frozen=True)
class ProductNorm:
    n: int
    p: float
    norm: float
    ratio: float

    COLUMNS = ("n", "p", "norm", "ratio")

    def row(self):
        return [self.n, self.p, self.norm, self.ratio]


def product_norm_scan(n_list, p_list, basis):
    """``||e_n||_{L^p(dL)}`` and its ratio to :func:`lp_growth_profile`."""
    rows = []
    for p in p_list:
        for n in n_list:
            v = lp_norm(basis.mode(n), p, basis)
            rows.append(ProductNorm(int(n), float(p), v, v / lp_growth_profile(n, p)))
    return rows


# ------------------------------------------------------------ convolution


def japanese(x):
    """``<x> = (1 + x^2)^(1/2)``."""
    return math.sqrt(1.0 + x * x)


def convolution_tail_integral(gamma, k1, k2):
    """``int <tau - k1>^-gamma <tau - k2>^-gamma dtau`` by adaptive quadrature."""
    if gamma < 1:
        raise ValueError("integral diverges or the bound fails for gamma < 1")

    def f(t):
        return (1.0 + (t - k1) ** 2) ** (-0.5 * gamma) * (1.0 + (t - k2) ** 2) ** (-0.5 * gamma)

    lo, hi = min(k1, k2), max(k1, k2)
    opts = dict(limit=500, epsabs=0.0, epsrel=1e-12)
    total = integrate.quad(f, -np.inf, lo, **opts)[0] + integrate.quad(f, hi, np.inf, **opts)[0]
    if hi > lo:
        mid = 0.5 * (lo + hi)
        total += integrate.quad(f, lo, mid, **opts)[0] + integrate.quad(f, mid, hi, **opts)[0]
    return total


def convolution_tail_check(gamma, k1, k2):
    """Ratio of the convolution integral to ``<k1 - k2>^-gamma``."""
    return convolution_tail_integral(gamma, k1, k2) * japanese(k1 - k2) ** gamma


def convolution_tail_scan(gamma, separations, center=0.0):
    """``(d, ratio)`` pairs with ``k1 = center``, ``k2 = center + d``."""
    return [(float(d), convolution_tail_check(gamma, center, center + d)) for d in separations]
