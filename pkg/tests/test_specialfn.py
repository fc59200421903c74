import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from valleyjump.specialfn import (Z_SWITCH, _asymptotic_correction, _series, erfi, log_erfi,
                                  log_erfi_array, log_erfi_ratio)

mpmath.mp.dps = 40


def _series_oracle(z):
    """Extended-precision Maclaurin series, independent of mpmath.erfi."""
    z = mpmath.mpf(z)
    term = z
    total = mpmath.mpf(0)
    n = 0
    while True:
        add = term / (2 * n + 1)
        total += add
        if abs(add) < total * mpmath.mpf(10) ** -35:
            break
        n += 1
        term *= z * z / n
    return 2 / mpmath.sqrt(mpmath.pi) * total


def test_erfi_at_one():
    assert abs(erfi(1.0).value - 1.650425758797543) <= 1e-12
    assert abs(float(_series_oracle(1.0)) - 1.650425758797543) <= 1e-15


@pytest.mark.parametrize("z", [1e-8, 0.1, 0.5, 1.0, 2.0, 3.7, 5.0, 5.99, 6.0, 6.5, 9.0, 15.0, 25.0])
def test_against_series_oracle(z):
    ref = _series_oracle(z)
    # exp(z**2) amplifies the rounding of z**2 by z**2: allow that conditioning
    cond = 4 * (1 + z * z) * np.finfo(float).eps
    assert erfi(z).value == pytest.approx(float(ref), rel=cond)
    assert log_erfi(z) == pytest.approx(float(mpmath.log(ref)), rel=1e-15, abs=1e-15)


def test_large_argument_log_domain():
    z = 40.0
    assert math.isinf(erfi(z).value)
    assert log_erfi(z) == pytest.approx(float(mpmath.log(mpmath.erfi(z))), rel=1e-15)
    assert log_erfi(1e6) == pytest.approx(float(mpmath.log(mpmath.erfi(1e6))), rel=1e-15)


def test_branch_agreement():
    for z in (Z_SWITCH - 1e-9, Z_SWITCH, Z_SWITCH + 1e-9):
        asy = math.exp(z * z) / (math.sqrt(math.pi) * z) * _asymptotic_correction(z)
        assert abs(_series(z) - asy) / _series(z) <= 1e-12


def test_zero_and_negative():
    assert erfi(0.0).value == 0.0
    assert math.isnan(erfi(0.0).log_value)
    assert erfi(-2.0).value == -erfi(2.0).value


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=30.0))
def test_odd_symmetry_exact(z):
    assert erfi(-z).value == -erfi(z).value


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-3, max_value=50.0), st.floats(min_value=1e-3, max_value=50.0))
def test_log_ratio_consistent(a, b):
    assert log_erfi_ratio(a, b) == pytest.approx(log_erfi(a) - log_erfi(b), abs=1e-12)


def test_array_matches_scalar():
    z = np.concatenate([np.linspace(0.01, 12.0, 97), [50.0, 1e3]])
    np.testing.assert_allclose(log_erfi_array(z), [log_erfi(v) for v in z], rtol=1e-14)


def test_monotone_increasing():
    z = np.linspace(1e-3, 30.0, 3001)
    assert np.all(np.diff(log_erfi_array(z)) > 0)


def test_large_z_log_value_against_asymptotic_series():
    z = 10.0
    # sum (2k-1)!! / (2 z^2)^k up to its smallest term
    correction, term, k = 1.0, 1.0, 1
    while True:
        nxt = term * (2 * k - 1) / (2 * z * z)
        if nxt >= term:
            break
        correction += nxt
        term, k = nxt, k + 1
    expected = z * z - math.log(z * math.sqrt(math.pi)) + math.log(correction)
    assert log_erfi(z) == pytest.approx(expected, rel=1e-15)
    assert log_erfi(z) == pytest.approx(float(mpmath.log(mpmath.erfi(z))), rel=1e-15)
