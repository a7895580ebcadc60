import numpy as np
import pytest

from fnls_lab.basis import build_basis
from fnls_lab.special_fn import BesselZeroTable


@pytest.fixture(scope="session")
def zeros1000():
    return BesselZeroTable.build(1000)


@pytest.fixture(scope="session")
def basis32():
    return build_basis(32)


@pytest.fixture(scope="session")
def basis64():
    return build_basis(64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_field(rng, n_max, decay=1.0):
    """Complex coefficients with ``|c_n| ~ n^-decay``."""
    from fnls_lab.field import SpectralField

    n = np.arange(1, n_max + 1)
    c = (rng.standard_normal(n_max) + 1j * rng.standard_normal(n_max)) * n ** (-decay)
    return SpectralField(c)


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records and prints one acceptance line, then asserts."""

    def report(k, ok, detail):
        line = f"CRITERION {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.setdefault(k, []).append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            for line in ACCEPTANCE[k]:
                terminalreporter.write_line(line)
