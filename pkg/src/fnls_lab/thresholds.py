"""Regularity thresholds s_1..s_5(alpha), s_*(alpha) and the growth exponent.

The five curves are kept in their unsimplified closed form so each can be
checked term by term against the constraint algebra.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

ALPHA_MIN = 2.0 / 3.0
S4_ALPHA_MIN = 7.0 / 12.0
CSV_COLUMNS = ("alpha", "s1", "s2", "s3", "s4", "s5", "s_star")


def s1(alpha):
    a = alpha
    return 0.25 * ((4 * a**2 - a - 1) / (2 * a - 1) + math.sqrt((5 * a**2 - 4 * a + 1) / (2 * a - 1) ** 2))


def s2(alpha):
    a = alpha
    disc = (a**4 + 10 * a**3 - 5 * a**2 - 2 * a + 1) / (2 * a - 1) ** 2
    return 0.25 * ((a**2 + a - 1) / (2 * a - 1) + math.sqrt(disc))


def s3(alpha):
    a = alpha
    disc = (36 * a**4 - 36 * a**3 + 33 * a**2 - 20 * a + 4) / (3 * a - 1) ** 2
    return 0.125 * ((6 * a**2 + 5 * a - 2) / (3 * a - 1) + math.sqrt(disc))


def s4(alpha):
    a = alpha
    disc = (96 * a**3 - 55 * a**2 - 4 * a + 4) / (3 * a - 1) ** 2
    return 0.125 * ((7 * a - 2) / (3 * a - 1) + math.sqrt(disc))


def s5(alpha):
    a = alpha
    return (2 * a**2 + 2 * a - 1) / (6 * a - 2)


@dataclass(frozen=True)
class ThresholdRow:
    """All five thresholds at one alpha.

    ``in_theory`` is False for alpha <= 2/3 (s2, s3 outside their domain);
    ``s4_valid`` marks the wider domain alpha > 7/12 of s4.
    """

    alpha: float
    s1: float
    s2: float
    s3: float
    s4: float
    s5: float
    s_star: float
    in_theory: bool
    s4_valid: bool

    def row(self):
        return [getattr(self, c) for c in CSV_COLUMNS]


def _check_alpha(alpha):
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha <= 0.5:
        raise ValueError("threshold formulas are singular for alpha <= 1/2")


def threshold_set(alpha):
    """Evaluate s1..s5 and s_* = max(s1, s2) at ``alpha``."""
    _check_alpha(alpha)
    a, b = s1(alpha), s2(alpha)
    return ThresholdRow(
        alpha=alpha,
        s1=a,
        s2=b,
        s3=s3(alpha),
        s4=s4(alpha) if alpha > 1.0 / 3.0 else math.nan,
        s5=s5(alpha),
        s_star=max(a, b),
        in_theory=alpha > ALPHA_MIN,
        s4_valid=alpha > S4_ALPHA_MIN,
    )


def s_star(alpha):
    """``max(s1(alpha), s2(alpha))`` for alpha in (2/3, 1]."""
    if not ALPHA_MIN < alpha <= 1:
        raise ValueError(f"s_star needs alpha in (2/3, 1], got {alpha}")
    return max(s1(alpha), s2(alpha))


@dataclass(frozen=True)
class GrowthExponent:
    """Growth exponent ``p`` and the two candidate time exponents.

    ``time_exponent_printed = (alpha - s) p / alpha`` and
    ``time_exponent_derived = (alpha - s) / (alpha p)``; the latter follows
    from ``||u(T)|| <~ N^((alpha-s)/alpha)`` with ``T ~ N^p``.
    """

    p: float
    branch1: float
    branch2: float
    time_exponent_printed: float
    time_exponent_derived: float


def growth_exponent(alpha, s, epsilon=0.0):
    """``p = min(branch1, branch2)`` for s > s_*(alpha).

    ``branch1 = (alpha-s)(2/alpha - 4 - (2 alpha + 1)/(2s - 1)) + alpha - 1/2 - eps``,
    ``branch2 = (alpha-s)(2/alpha - 4) + 3 alpha - 2 + eps``.
    """
    star = s_star(alpha)
    if s <= star:
        raise ValueError(f"s={s} must exceed s_*({alpha})={star:.6f}")
    gap = alpha - s
    b1 = gap * (2 / alpha - 4 - (2 * alpha + 1) / (2 * s - 1)) + alpha - 0.5 - epsilon
    b2 = gap * (2 / alpha - 4) + 3 * alpha - 2 + epsilon
    p = min(b1, b2)
    derived = gap / (alpha * p) if p != 0 else math.copysign(math.inf, gap)
    return GrowthExponent(p, b1, b2, gap * p / alpha, derived)


def alpha_grid(alpha_min, alpha_max, steps):
    """``steps + 1`` evenly spaced values from ``alpha_min`` to ``alpha_max``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if alpha_min > alpha_max:
        raise ValueError("alpha_min must not exceed alpha_max")
    return list(np.linspace(alpha_min, alpha_max, steps + 1))


def threshold_curve(alpha_grid):
    """One ThresholdRow per grid value, in grid order."""
    grid = [float(a) for a in alpha_grid]
    if not grid:
        raise ValueError("empty alpha grid")
    return [threshold_set(a) for a in grid]


def write_csv(rows, handle):
    w = csv.writer(handle, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([repr(float(x)) for x in r.row()])


def write_svg(rows, path):
    """Line chart of s1..s5 and s_* against alpha (requires matplotlib)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    a = [r.alpha for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in CSV_COLUMNS[1:]:
        ax.plot(a, [getattr(r, name) for r in rows], label=name, lw=2.2 if name == "s_star" else 1.2)
    ax.plot(a, a, "k:", lw=0.8, label="s = alpha")
    ax.set_xlabel("alpha")
    ax.set_ylabel("s")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
