"""Normal-law kernel: values pinned by independent oracles.

Frozen constants below were produced by the continued-fraction and
mpmath routes in oracles.py, then written down; the tests re-derive
them on the fly as well so a regression in either route is visible.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from miw.gaussians import (
    SQRT_2PI,
    mills_ratio,
    mills_ratio_gap_bound,
    mills_ratio_product_bound,
    norm_cdf,
    norm_cdf_integral,
    norm_pdf,
    norm_quantile,
    norm_sf,
    norm_sf_integral,
)
from oracles import cdf_erf, cdf_integral_quad, mills_cf, mills_mp, quantile_bisect


def test_cdf_reference_values():
    assert norm_cdf(0.0) == 0.5
    # Phi(-sqrt(2)/2), mpmath at 50 digits
    assert norm_cdf(-math.sqrt(2.0) / 2.0) == pytest.approx(
        0.23975006109347669, abs=1e-16
    )
    w = np.linspace(-8.0, 8.0, 401)
    ref = np.array([cdf_erf(v) for v in w])
    assert np.max(np.abs(norm_cdf(w) - ref)) < 1e-15


def test_sf_is_mirrored_cdf():
    w = np.linspace(-10.0, 10.0, 201)
    assert np.array_equal(norm_sf(w), norm_cdf(-w))


def test_pdf_normalization_constant():
    assert norm_pdf(0.0) == pytest.approx(1.0 / SQRT_2PI, abs=1e-17)
    assert norm_pdf(3.0) == pytest.approx(math.exp(-4.5) / SQRT_2PI, rel=1e-15)


def test_mills_frozen_values():
    assert mills_ratio(0.0) == pytest.approx(1.2533141373155001, abs=1e-15)
    # continued fraction and mpmath both give 0.099028596471731921
    assert mills_ratio(10.0) == pytest.approx(0.099028596471731921, abs=5e-17)
    assert mills_ratio(10.0) == pytest.approx(mills_cf(10.0), rel=1e-14)
    assert mills_ratio(10.0) == pytest.approx(mills_mp(10.0), rel=1e-14)


def test_mills_against_continued_fraction_grid():
    for w in np.geomspace(1.0, 40.0, 60):
        assert mills_ratio(float(w)) == pytest.approx(mills_cf(float(w)), rel=1e-13)


def test_mills_against_mpmath_two_bands():
    # moderate band: dominated by erfcx accuracy
    for w in np.linspace(-8.0, 40.0, 97):
        assert mills_ratio(float(w)) == pytest.approx(mills_mp(float(w)), rel=1e-13)
    # deep negative band: exp(w^2/2) argument rounding costs a few ulps more
    for w in np.linspace(-37.5, -8.0, 60):
        assert mills_ratio(float(w)) == pytest.approx(mills_mp(float(w)), rel=5e-13)


def test_mills_overflow_boundary():
    # w^2/2 crosses the double exponent range near |w| = 37.68
    assert math.isfinite(mills_ratio(-37.6))
    assert math.isinf(mills_ratio(-37.7))
    assert mills_ratio(-37.7) > 0


@given(st.floats(min_value=0.05, max_value=39.0))
def test_mills_decreasing(w):
    assert mills_ratio(w) > mills_ratio(w + 0.01)


def test_quantile_frozen_values():
    assert norm_quantile(0.5) == 0.0
    # bisection oracle: -0.43072729929545749021
    assert norm_quantile(1.0 / 3.0) == pytest.approx(-0.4307272992954574, abs=2e-16)
    assert norm_quantile(1.0 / 3.0) == pytest.approx(quantile_bisect(1.0 / 3.0), abs=1e-13)
    assert norm_quantile(0.975) == pytest.approx(quantile_bisect(0.975), abs=1e-13)


def test_quantile_reflection():
    # bit-exact whenever 1-p is itself exact, i.e. dyadic p
    for p in (0.25, 0.125, 0.375):
        assert norm_quantile(p) == -norm_quantile(1.0 - p)
    # elsewhere the rounding of 1-p costs at most an ulp
    for p in (0.1, 0.4):
        assert norm_quantile(p) == pytest.approx(-norm_quantile(1.0 - p), rel=1e-15)


@given(st.floats(min_value=1e-300, max_value=0.5))
@settings(max_examples=200)
def test_quantile_probability_roundtrip(p):
    assert abs(norm_cdf(norm_quantile(p)) - p) <= 1e-14


@given(st.floats(min_value=-8.0, max_value=8.0))
@settings(max_examples=200)
def test_quantile_value_roundtrip(w):
    # Phi saturates near 1, so the achievable accuracy on the upper side
    # degrades like (half an ulp at 1) / pdf; the bound tracks that
    limit = max(1e-12, 1.1e-16 / norm_pdf(w))
    assert abs(norm_quantile(norm_cdf(w)) - w) <= limit


def test_quantile_rejects_endpoints():
    for bad in (0.0, 1.0, -0.1, 1.1, math.nan):
        with pytest.raises(ValueError):
            norm_quantile(bad)


def test_cdf_integral_value_and_identity():
    assert norm_cdf_integral(0.0) == pytest.approx(0.3989422804014327, abs=1e-16)
    # J(w) - J(-w) = w exactly in exact arithmetic
    for w in (0.3, 1.0, 2.5, 6.0):
        assert norm_cdf_integral(w) - norm_cdf_integral(-w) == pytest.approx(w, rel=1e-14)
    assert norm_cdf_integral(-40.0) == 0.0


def test_cdf_integral_against_quadrature():
    for w in (-6.0, -2.0, -0.5, 0.0, 0.7, 2.0, 5.0):
        assert norm_cdf_integral(w) == pytest.approx(cdf_integral_quad(w), abs=1e-12)


def test_sf_integral_is_reflected():
    w = np.linspace(-6.0, 6.0, 25)
    assert np.array_equal(norm_sf_integral(w), norm_cdf_integral(-w))


def test_scalar_array_symmetry():
    assert isinstance(mills_ratio(1.0), float)
    assert isinstance(norm_cdf_integral(1.0), float)
    arr = mills_ratio(np.array([1.0, 2.0]))
    assert arr.shape == (2,)
    assert float(arr[0]) == mills_ratio(1.0)


def test_tail_bound_checks_pass_on_grid():
    for w in np.geomspace(1e-4, 40.0, 500):
        assert mills_ratio_product_bound(float(w)).passed
        assert mills_ratio_gap_bound(float(w)).passed


def test_tail_bound_checks_reject_nonpositive():
    with pytest.raises(ValueError):
        mills_ratio_product_bound(0.0)
    with pytest.raises(ValueError):
        mills_ratio_gap_bound(-1.0)
