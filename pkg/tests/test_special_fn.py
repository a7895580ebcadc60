import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jn_zeros

from fnls_lab.special_fn import BesselZeroTable, bessel_j, bessel_zero, bessel_zeros, mcmahon

# first two zeros from bisection on the alternating power series, refined with mpmath at 50 digits
Z1 = 2.404825557695773
Z2 = 5.520078110286311


def series_j0(x, terms=60):
    """Independent oracle: J0 by its power series in exact rationals then float."""
    mpmath.mp.dps = 50
    x = mpmath.mpf(x)
    return float(mpmath.nsum(lambda k: (-1) ** int(k) * (x / 2) ** (2 * k) / mpmath.factorial(k) ** 2, [0, terms]))


def bisect_zero(lo, hi, f, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_series_bisection_oracle_reproduces_frozen_zeros():
    assert bisect_zero(2.0, 3.0, series_j0) == pytest.approx(Z1, abs=2e-15)
    assert bisect_zero(5.0, 6.0, series_j0) == pytest.approx(Z2, abs=2e-15)


def test_origin_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_j0_at_first_zero_is_tiny():
    assert abs(bessel_j(0, Z1)) < 1e-12


def test_first_zeros_match_frozen_values():
    assert bessel_zero(1) == pytest.approx(Z1, abs=1e-14)
    assert bessel_zero(2) == pytest.approx(Z2, abs=1e-14)


@pytest.mark.parametrize("x", [0.1, 1.0, 2.9, 3.0, 3.1, 7.5, 8.0, 12.34, 24.9, 25.0, 25.1, 99.0, 1234.5, 9999.0])
@pytest.mark.parametrize("order", [0, 1])
def test_against_mpmath_across_regimes(order, x):
    mpmath.mp.dps = 40
    ref = float(mpmath.besselj(order, x))
    envelope = min(1.0, math.sqrt(2.0 / (math.pi * x)))
    assert abs(bessel_j(order, x) - ref) <= 1e-13 * envelope


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.0, max_value=1e4, allow_nan=False))
def test_random_points_against_mpmath(x):
    mpmath.mp.dps = 40
    for order in (0, 1):
        ref = float(mpmath.besselj(order, x))
        envelope = min(1.0, math.sqrt(2.0 / (math.pi * max(x, 1e-300))))
        assert abs(bessel_j(order, x) - ref) <= 1e-13 * envelope


def test_vectorised_shape_and_scalar_type():
    x = np.linspace(0, 50, 12).reshape(3, 4)
    assert bessel_j(0, x).shape == (3, 4)
    assert isinstance(bessel_j(0, 1.5), float)


@pytest.mark.parametrize("order,x", [(2, 1.0), (0, -1.0), (1, np.nan), (0, np.inf)])
def test_rejects_bad_input(order, x):
    with pytest.raises(ValueError):
        bessel_j(order, x)


def test_bessel_zero_rejects_nonpositive():
    with pytest.raises(ValueError):
        bessel_zero(0)
    with pytest.raises(ValueError):
        bessel_zeros(0)


def test_zeros_against_scipy(zeros1000):
    assert np.max(np.abs(zeros1000.z - jn_zeros(0, 1000))) < 1e-12


@pytest.mark.parametrize("n", [1, 3, 17, 100, 513, 1000])
def test_zeros_against_mpmath(zeros1000, n):
    mpmath.mp.dps = 30
    assert abs(zeros1000.zero(n) - float(mpmath.besseljzero(0, n))) < 1e-12


def test_zero_100_close_to_two_term_expansion():
    beta = (100 - 0.25) * math.pi
    assert abs(bessel_zero(100) - (beta + 1 / (8 * beta))) < 2e-7


def test_table_invariants(zeros1000):
    z = zeros1000.z
    n = np.arange(1, z.size + 1)
    assert 2.40 < z[0] < 2.41
    assert np.all(np.diff(z) > 0)
    assert np.max(np.abs(bessel_j(0, z))) < 1e-12
    gaps = np.diff(z)
    assert np.all(np.abs(gaps[3:] - math.pi) < 0.05 / n[3:-1])
    assert np.all(np.abs(gaps[49:] - math.pi) < 1e-3)
    beta = (n - 0.25) * math.pi
    assert np.all(np.abs(z - (beta + 1 / (8 * beta))) <= 0.5 / n**3)


def test_interlacing_with_j1_sign_changes(zeros1000):
    z = zeros1000.z[:201]
    for a, b in zip(z[:-1], z[1:]):
        t = np.linspace(a, b, 400)[1:-1]
        s = np.sign(bessel_j(1, t))
        assert np.count_nonzero(s[1:] != s[:-1]) == 1


def test_mcmahon_seed_is_close():
    n = np.arange(1, 50)
    assert np.max(np.abs(mcmahon(n) - jn_zeros(0, 49))) < 2e-3


def test_table_is_read_only(zeros1000):
    with pytest.raises(ValueError):
        zeros1000.z[0] = 1.0
    assert len(zeros1000) == 1000 == zeros1000.n_max


def test_newton_failure_signals_broken_evaluator():
    with pytest.raises(RuntimeError):
        bessel_zeros(5, max_iter=0)
