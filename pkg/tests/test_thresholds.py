import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fnls_lab.thresholds import (
    CSV_COLUMNS,
    alpha_grid,
    growth_exponent,
    s1,
    s2,
    s3,
    s4,
    s5,
    s_star,
    threshold_curve,
    threshold_set,
    write_csv,
)

in_theory = st.floats(2 / 3 + 1e-6, 1.0)


def test_values_at_alpha_one():
    r = threshold_set(1.0)
    assert abs(r.s1 - (2 + math.sqrt(2)) / 4) < 1e-12
    assert abs(r.s2 - (1 + math.sqrt(5)) / 4) < 1e-12
    assert r.s5 == pytest.approx(0.75, abs=1e-15)
    assert r.s_star == r.s1 > r.s2


def test_s3_s4_at_alpha_one_from_radicals():
    # direct simplification at alpha = 1: s3 = (9 + sqrt(17))/16, s4 = (5 + sqrt(41))/16
    assert s3(1.0) == pytest.approx((9 + math.sqrt(17)) / 16, abs=1e-14)
    assert s4(1.0) == pytest.approx((5 + math.sqrt(41)) / 16, abs=1e-14)


def test_s2_hits_alpha_at_two_thirds():
    assert s2(2 / 3) == pytest.approx(2 / 3, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(in_theory)
def test_star_is_max_and_below_alpha(a):
    assert s_star(a) == max(s1(a), s2(a))
    assert s_star(a) < a


@settings(max_examples=200, deadline=None)
@given(in_theory)
def test_all_real_on_domain(a):
    r = threshold_set(a)
    assert all(math.isfinite(getattr(r, c)) for c in CSV_COLUMNS)
    assert r.in_theory and r.s4_valid


def test_star_below_alpha_fine_grid():
    grid = np.arange(1, 334) * 1e-3 + 2 / 3
    grid = grid[grid <= 1.0]
    star = np.array([s_star(a) for a in grid])
    assert np.all(star < grid)
    assert np.max(np.abs(np.diff(star))) < 10 * 1e-3


def test_domain_flags_and_errors():
    r = threshold_set(0.62)
    assert not r.in_theory and r.s4_valid
    assert not threshold_set(0.55).s4_valid
    for bad in (0.0, 1.2, 0.5):
        with pytest.raises(ValueError):
            threshold_set(bad)
    with pytest.raises(ValueError):
        s_star(0.6)


def test_growth_exponent_verbatim_arithmetic():
    g = growth_exponent(1.0, 0.86)
    assert g.branch1 == pytest.approx(0.14 * (-2 - 3 / 0.72) + 0.5, abs=1e-14)
    assert g.branch1 == pytest.approx(-0.3633333333333333, abs=1e-14)
    assert g.branch2 == pytest.approx(0.72, abs=1e-14)
    assert g.p == g.branch1
    assert g.time_exponent_printed == pytest.approx(0.14 * g.p, abs=1e-15)
    assert g.time_exponent_derived == pytest.approx(0.14 / g.p, abs=1e-14)


def test_growth_exponent_first_branch_at_09():
    assert growth_exponent(1.0, 0.9).branch1 == pytest.approx(-0.075, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(in_theory, st.floats(0.0, 1.0), st.floats(0, 1e-3))
def test_growth_exponent_epsilon_linear(a, frac, eps):
    lo = s_star(a)
    s = lo + (a - lo) * (0.01 + 0.98 * frac)
    g0, g1 = growth_exponent(a, s, 0.0), growth_exponent(a, s, eps)
    assert abs(g1.p - g0.p) <= eps + 1e-15


def test_growth_exponent_limit_and_continuity():
    a = 0.9
    g = growth_exponent(a, a - 1e-9)
    assert g.branch1 == pytest.approx(a - 0.5, abs=1e-7)
    assert g.branch2 == pytest.approx(3 * a - 2, abs=1e-7)
    ss = np.linspace(s_star(a) + 1e-3, a - 1e-3, 400)
    ps = np.array([growth_exponent(a, s).p for s in ss])
    assert np.max(np.abs(np.diff(ps))) < 0.01


def test_growth_exponent_rejects_below_threshold():
    with pytest.raises(ValueError):
        growth_exponent(1.0, 0.85)


def test_curve_and_csv(tmp_path):
    rows = threshold_curve([1.0])
    assert rows == [threshold_set(1.0)]
    grid = alpha_grid(0.67, 1.0, 300)
    rows = threshold_curve(grid)
    assert len(rows) == 301 and [r.alpha for r in rows] == [float(a) for a in grid]
    assert all(r.s_star < r.alpha for r in rows)
    with pytest.raises(ValueError):
        threshold_curve([])
    p = tmp_path / "t.csv"
    with open(p, "w") as fh:
        write_csv(rows, fh)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 302
