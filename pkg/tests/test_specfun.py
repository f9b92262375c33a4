import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kickedrotor.core import DomainError
from kickedrotor.specfun import band_cutoff, bessel_band, bessel_table, kick_kernel, signed_band

from oracles import bessel_series


def test_zero_argument():
    np.testing.assert_array_equal(bessel_band(0.0, 3).values, [1.0, 0.0, 0.0, 0.0])


def test_j0_at_one():
    # power series summed in 60-digit arithmetic
    assert bessel_band(1.0, 5).values[0] == pytest.approx(0.7651976865579666, rel=1e-15)


def test_first_zero_of_j0():
    # zero located by bisection on the power series
    assert abs(bessel_band(2.404825557695773, 3).values[0]) < 1e-10


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 15.0, 20.0])
def test_power_series_agreement(x):
    values = bessel_band(x, 30).values
    ref = np.array([bessel_series(m, x) for m in range(31)])
    mask = np.abs(ref) > 1e-280
    rel = np.abs(values[mask] - ref[mask]) / np.abs(ref[mask])
    assert rel.max() <= 1e-12


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 20.0, 100.0, 1000.0])
def test_normalization_identity(x):
    band = bessel_band(x, int(x) + 100)
    assert band.normalization_error() <= 1e-10
    assert np.all(np.abs(band.values) <= 1.0)


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 20.0, 100.0, 1000.0, 4000.0])
def test_recurrence_residual(x):
    j = bessel_band(x, int(x) + 80).values
    m = np.arange(1, j.size - 1)
    resid = np.abs(j[m - 1] + j[m + 1] - (2 * m / x) * j[m])
    assert resid.max() <= 1e-10


@pytest.mark.parametrize("x", [0.3, 2.0, 7.5, 30.0])
def test_derivative_identity(x):
    h = 1e-6
    d = (bessel_band(x + h, 2).values[0] - bessel_band(x - h, 2).values[0]) / (2 * h)
    assert d == pytest.approx(-bessel_band(x, 2).values[1], abs=1e-8)


def test_tiny_arguments_use_leading_term():
    x = 1e-40
    v = bessel_band(x, 3).values
    assert v[0] == 1.0
    assert v[1] == pytest.approx(x / 2, rel=1e-15)


def test_negative_argument_rejected():
    with pytest.raises(DomainError):
        bessel_band(-1.0, 3)
    with pytest.raises(DomainError):
        bessel_table([1.0, -2.0], 3)


def test_table_matches_scalar_band():
    xs = np.array([0.0, 0.3, 4.0, 60.0])
    table = bessel_table(xs, 80)
    for row, x in zip(table, xs):
        np.testing.assert_allclose(row, bessel_band(x, 80).values, rtol=1e-12, atol=1e-300)


def test_band_cutoff_examples():
    assert band_cutoff(0.0, 1e-14) == 0
    m = band_cutoff(10.0, 1e-14)
    wide = bessel_band(10.0, 2 * m).values
    assert np.sum(wide[m + 1:] ** 2) < 1e-14
    assert np.sum(wide[m:] ** 2) >= 1e-14


@settings(max_examples=40)
@given(st.floats(0.0, 500.0), st.floats(0.0, 500.0))
def test_band_cutoff_monotone(a, b):
    lo, hi = sorted((a, b))
    assert band_cutoff(lo, 1e-14) <= band_cutoff(hi, 1e-14)


def test_kick_kernel_reflection():
    m, kernel = signed_band(3.0, 1e-20)
    values = bessel_band(3.0, m).values
    # (-i)^d J_d with J_{-d} = (-1)^d J_d
    expected = np.array([(-1j) ** d * values[abs(d)] * (-1) ** (d % 2 if d < 0 else 0)
                         for d in range(-m, m + 1)])
    np.testing.assert_allclose(kernel, expected, rtol=0, atol=1e-16)
    np.testing.assert_allclose(kick_kernel(values), kernel)
