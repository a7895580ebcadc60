"""I-operator, modified energy and the almost-conservation experiment."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import energy, evolve, initial_field
from .field import SpectralField, sobolev_norm

DEFAULT_EPSILON = 1e-3
DEFAULT_B = 0.55
TOTAL_TIME_CAP = 2.0


@dataclass(frozen=True)
class MultiplierParams:
    """Cutoff ``N``, data regularity ``s`` and fractional power ``alpha`` (s < alpha <= 1).

    ``smooth=True`` replaces the kink at N by a C^1 smoothstep blend on [N, 2N].
    """

    N: float
    s: float
    alpha: float
    smooth: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not (self.s < self.alpha <= 1):
            raise ValueError(f"need s < alpha <= 1, got s={self.s}, alpha={self.alpha}")


def multiplier(xi, params):
    """``m_N(xi)``: 1 below N, ``(xi/N)^(s-alpha)`` above (2N with ``smooth``)."""
    xi = np.abs(np.asarray(xi, dtype=float))
    ratio = np.maximum(xi / params.N, 1.0)
    tail = ratio ** (params.s - params.alpha)
    if params.smooth:
        x = np.clip(ratio - 1.0, 0.0, 1.0)
        w = x * x * (3.0 - 2.0 * x)
        out = 1.0 - w * (1.0 - tail)
    else:
        out = tail
    return float(out) if out.ndim == 0 else out


def apply_I(field, params, zeros):
    """``I_N u = sum m_N(z_n) c_n e_n``."""
    return SpectralField(multiplier(zeros.z[: field.n_max], params) * field.c)


def modified_energy(field, params, basis, quartic=True):
    """Energy of ``I_N u``; accepts a SpectralField or a SimState.

    ``quartic=False`` drops the ``1/4 int |I u|^4`` term, leaving the energy of
    the linear equation.
    """
    field = getattr(field, "field", field)
    iu = apply_I(field, params, basis.zeros)
    if quartic:
        return energy(iu, params.alpha, basis)
    lam = basis.z[: iu.n_max] ** (2 * params.alpha)
    return 0.5 * float(np.sum(lam * np.abs(iu.c) ** 2))


def b_of(x, epsilon=DEFAULT_EPSILON):
    """``b(x) = 1/4 + (1 - x)/2 + epsilon``."""
    return 0.25 + 0.5 * (1.0 - x) + epsilon


def lwp_window(params, b=DEFAULT_B, iu0_norm=1.0, epsilon=DEFAULT_EPSILON):
    """Local existence time ``||I u0||_{H^alpha}^(-2/(1 + 2b - 4 b(s)))``."""
    if params.s <= 0.5:
        raise ValueError("local theory needs s > 1/2")
    if b <= 0.5:
        raise ValueError("need b > 1/2")
    denom = 1.0 + 2.0 * b - 4.0 * b_of(params.s, epsilon)
    if denom <= 0:
        raise ValueError(f"1 + 2b - 4b(s) = {denom:.4g} <= 0: s={params.s} too small for b={b}")
    if iu0_norm <= 0:
        raise ValueError("iu0_norm must be positive")
    return iu0_norm ** (-2.0 / denom)


INCREMENT_TERMS = (
    "N^{1/2-a+} N^{-4(a-s)(b-b(a-))/(1+2b-4b(s))} N^{4(a-s)}",
    "N^{2-3a-} N^{4(a-s)}",
    "N^{2-3a} N^{-(a-s)/(1+2b-4b(s))} N^{6(a-s)}",
    "N^{7/2-6a+} N^{6(a-s)}",
    "N^{2-4a+} N^{6(a-s)}",
)


def increment_bound_exponents(alpha, s, b=DEFAULT_B, epsilon=DEFAULT_EPSILON):
    """N-exponents of the five energy-increment terms, with ``||I u0||`` replaced by ``N^(alpha-s)``.

    Every ``+``/``-`` superscript becomes ``+epsilon``/``-epsilon``; ``b(alpha-)``
    is ``b`` evaluated at ``alpha - epsilon``.
    """
    if not 0.5 < s < alpha <= 1:
        raise ValueError("need 1/2 < s < alpha <= 1")
    eps = epsilon
    gap = alpha - s
    denom = 1.0 + 2.0 * b - 4.0 * b_of(s, eps)
    values = (
        (0.5 - alpha + eps) - 4.0 * gap * (b - b_of(alpha - eps, eps)) / denom + 4.0 * gap,
        (2.0 - 3.0 * alpha - eps) + 4.0 * gap,
        (2.0 - 3.0 * alpha) - gap / denom + 6.0 * gap,
        (3.5 - 6.0 * alpha + eps) + 6.0 * gap,
        (2.0 - 4.0 * alpha + eps) + 6.0 * gap,
    )
    return list(zip(INCREMENT_TERMS, values))


@dataclass(frozen=True)
class IncrementRecord:
    N: float
    delta: float
    window: int
    E_start: float
    E_end: float

    COLUMNS = ("N", "delta", "window", "E_start", "E_end", "increment")

    @property
    def increment(self):
        return self.E_end - self.E_start

    def row(self):
        return [self.N, self.delta, self.window, self.E_start, self.E_end, self.increment]


@dataclass(frozen=True)
class WindowPlan:
    """Window length, count and inner step for one cutoff."""

    N: float
    delta: float
    windows: int
    steps: int

    @property
    def h(self):
        return self.delta / self.steps


def plan_windows(config, basis, N, u0=None):
    """Window layout for cutoff ``N``.

    The window is ``min(lwp_window, TOTAL_TIME_CAP / config.windows)`` so that
    exactly ``config.windows`` windows fit in the total time cap; each window
    is split into the fewest equal steps not longer than ``config.dt``.
    """
    if N > basis.z[config.n_max - 1] / 4:
        raise ValueError(f"N={N} exceeds z_nmax/4={basis.z[config.n_max - 1] / 4:.3g}")
    params = MultiplierParams(N, config.s, config.alpha)
    u0 = initial_field(config, basis.zeros) if u0 is None else u0
    iu0 = sobolev_norm(apply_I(u0, params, basis.zeros), config.alpha, basis.zeros)
    delta = min(lwp_window(params, config.b, iu0, config.epsilon), TOTAL_TIME_CAP / config.windows)
    steps = max(1, math.ceil(delta / config.dt - 1e-9))
    return WindowPlan(N, delta, config.windows, steps)


def _run_group(args):
    # one trajectory serves every cutoff sharing the same window layout
    config, basis, plans, linear_only = args
    head = plans[0]
    u0 = initial_field(config, basis.zeros)
    params = [MultiplierParams(p.N, config.s, config.alpha) for p in plans]
    energies = [[] for _ in plans]

    def record(t, c):
        f = SpectralField(c)
        for k, prm in enumerate(params):
            energies[k].append(modified_energy(f, prm, basis, quartic=not linear_only))

    if linear_only:
        # m_N commutes with the linear flow, so only phases change
        lam = basis.z[: config.n_max] ** (2 * config.alpha)
        for k in range(head.windows + 1):
            record(k * head.delta, np.exp(-1j * k * head.delta * lam) * u0.c)
    else:
        evolve(u0, config.alpha, basis, head.h, head.windows * head.delta, head.steps, config.nonlinear, record)
    return [
        [IncrementRecord(p.N, p.delta, k + 1, e[k], e[k + 1]) for k in range(p.windows)]
        for p, e in zip(plans, energies)
    ]


def increment_experiment(config, basis, N_list=None, workers=1, linear_only=False):
    """Modified-energy increments over consecutive windows, for every cutoff in ``N_list``.

    ``N_list`` defaults to ``config.N_list``. All cutoffs see the same seeded
    datum. ``linear_only`` replaces the flow by the linear one and the energy
    by its quadratic part. Records come back grouped by N in input order, independent of
    ``workers``.
    """
    from .parallel import ordered_map

    N_list = list(N_list if N_list is not None else config.N_list)
    if not N_list:
        raise ValueError("increment experiment needs at least one N")
    if not config.s < config.alpha:
        raise ValueError("increment experiment needs s < alpha")
    u0 = initial_field(config, basis.zeros)
    plans = [plan_windows(config, basis, N, u0) for N in N_list]
    groups = {}
    for p in plans:
        groups.setdefault((p.delta, p.windows, p.steps), []).append(p)
    tasks = [(config, basis, g, linear_only) for g in groups.values()]
    by_N = {}
    for group, result in zip(groups.values(), ordered_map(_run_group, tasks, workers)):
        for p, recs in zip(group, result):
            by_N[p.N] = recs
    return [rec for N in N_list for rec in by_N[N]]


def max_increment(records, N=None):
    """Largest ``|increment|`` over windows (restricted to cutoff ``N`` if given)."""
    return max(abs(r.increment) for r in records if N is None or r.N == N)
