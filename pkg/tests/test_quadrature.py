import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from widematch._quadrature import QuadratureError, integrate


@given(st.integers(0, 12), st.floats(0.0, 2.0), st.floats(0.1, 3.0))
def test_polynomials(k, a, width):
    b = a + width
    val, err = integrate(lambda x: x**k, a, b, rtol=1e-12)
    exact = (b ** (k + 1) - a ** (k + 1)) / (k + 1)
    assert math.isclose(val, exact, rel_tol=1e-11, abs_tol=1e-300)
    assert err <= 1e-11 * abs(exact) + 1e-300


def test_endpoint_singularity():
    val, _ = integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0, rtol=1e-9)
    assert math.isclose(val, 2.0, rel_tol=1e-8)


def test_kink_with_breakpoint():
    val, _ = integrate(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=[0.3], rtol=1e-13)
    assert math.isclose(val, 0.3**2 / 2 + 0.7**2 / 2, rel_tol=1e-13)


def test_reversed_and_empty_limits():
    assert integrate(np.cos, 1.0, 0.0)[0] == pytest.approx(-math.sin(1.0), rel=1e-12)
    assert integrate(np.cos, 1.0, 1.0) == (0.0, 0.0)


def test_non_finite_integrand():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)


def test_cap_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.sin(1 / x), 1e-6, 1.0, rtol=1e-14, max_intervals=40)
    assert np.isfinite(info.value.value) and info.value.error > 0
