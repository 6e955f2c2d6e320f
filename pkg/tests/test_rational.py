import numpy as np
import pytest
from hypothesis import given, strategies as st

from widematch.rational import (DegenerateFunctionError, FitOrderTooLowError, RationalFunction,
                                SampledResponse, fit_rational, log_taylor_coefficients,
                                reflection_roots)


def test_from_coefficients_matches_polyval():
    fn = RationalFunction.from_coefficients([2.0, 3.0], [1.0, 4.0, 5.0])
    s = np.array([0.3j, 1 + 2j, -0.5])
    ref = np.polyval([2.0, 3.0], s) / np.polyval([1.0, 4.0, 5.0], s)
    np.testing.assert_allclose(fn(s), ref, rtol=1e-13)


def test_zero_denominator_and_pole_evaluation():
    with pytest.raises(ZeroDivisionError):
        RationalFunction.from_coefficients([1.0], [0.0])
    fn = RationalFunction([], [-1.0], 1.0)
    with pytest.raises(ZeroDivisionError):
        fn(np.array([-1.0 + 0j]))


def test_non_finite_roots_rejected():
    with pytest.raises(ValueError):
        RationalFunction([np.inf], [-1.0], 1.0)


@given(st.lists(st.floats(-5, 5), min_size=0, max_size=3),
       st.lists(st.floats(-5, -0.1), min_size=1, max_size=3),
       st.floats(0.1, 3.0), st.floats(0.05, 4.0))
def test_flip_is_reflection(zeros, poles, gain, w):
    fn = RationalFunction(zeros, poles, gain)
    s = 0.3 + 1j * w
    assert np.isclose(fn.flip()(s), fn(-s), rtol=1e-10, atol=1e-14)


def test_chu_reflection_roots_origin_quadruple():
    tau = 1.43e-11
    fn = RationalFunction.from_coefficients([1.0], [2 * tau * tau, 2 * tau, 1.0])
    roots = reflection_roots(fn)
    assert roots == [(0j, 4)]


def test_first_order_reflection_roots():
    # S = a/(s + b): S(s)S(-s) - 1 = 0 at s^2 = b^2 - a^2
    a, b = 0.6, 1.0
    roots = reflection_roots(RationalFunction([], [-b], a))
    # both members of the +-s0 pair, no degree deficit
    assert [m for _, m in roots] == [1, 1]
    got = sorted(r.real for r, _ in roots)
    np.testing.assert_allclose(got, [-0.8, 0.8], rtol=1e-12)
    assert all(r.imag == 0 for r, _ in roots)


def test_lossless_load_is_degenerate():
    with pytest.raises(DegenerateFunctionError):
        reflection_roots(RationalFunction([1.0], [-1.0], 1.0))


@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.1, 0.9))
def test_log_taylor_against_finite_differences(p, center, k):
    fn = RationalFunction([-0.5 * p], [-p, -2 * p], k)
    c = log_taylor_coefficients(fn, complex(center), 3)
    g = lambda s: np.log(1.0 / fn(np.array([s]))[0])  # noqa: E731
    h = 1e-3 * center
    d1 = (g(center + h) - g(center - h)) / (2 * h)
    d2 = (g(center + h) - 2 * g(center) + g(center - h)) / h**2
    assert np.isclose(c[0], g(center), rtol=1e-12)
    assert np.isclose(c[1], d1, rtol=1e-5)
    assert np.isclose(c[2], d2 / 2, rtol=1e-3)


def test_log_taylor_singular_center():
    fn = RationalFunction([-1.0], [-2.0], 1.0)
    with pytest.raises(ValueError):
        log_taylor_coefficients(fn, -1.0, 2)
    with pytest.raises(ValueError):
        log_taylor_coefficients(fn, -2.0, 2)


@given(st.floats(0.3, 3.0), st.floats(0.05, 0.8), st.floats(0.1, 0.9))
def test_fit_recovers_second_order(w0, zeta, k):
    # keep the resonant peak below one so no passivity scaling applies
    k *= min(1.0, 2 * zeta * np.sqrt(1 - zeta**2))
    # scaled to GHz frequencies so the fit sees realistic magnitudes
    scale = 2 * np.pi * 1e9
    true = RationalFunction([], [scale * w0 * (-zeta + 1j * np.sqrt(1 - zeta**2)),
                                 scale * w0 * (-zeta - 1j * np.sqrt(1 - zeta**2))],
                            k * (scale * w0) ** 2)
    f = np.linspace(0.1e9, 5e9, 200)
    res = fit_rational(SampledResponse(f, true.at_frequency(f)), 2, tol=1e-6)
    assert res.function.is_stable()
    np.testing.assert_allclose(res.function.at_frequency(f), true.at_frequency(f),
                               rtol=0, atol=1e-6 * np.max(np.abs(true.at_frequency(f))))


def test_fit_reports_too_low_order():
    f = np.linspace(1e9, 10e9, 300)
    s = 2j * np.pi * f
    true = RationalFunction([], [-1e9 * 2 * np.pi * (0.1 + 1j), -1e9 * 2 * np.pi * (0.1 - 1j),
                                 -1e9 * 2 * np.pi * (0.1 + 7j), -1e9 * 2 * np.pi * (0.1 - 7j)],
                            0.2 * (2 * np.pi * 1e9) ** 4 * 7)
    with pytest.raises(FitOrderTooLowError) as info:
        fit_rational(SampledResponse(f, true(s)), 1, tol=1e-6)
    assert info.value.best.error > 1e-6


def test_fit_is_passive():
    f = np.linspace(1e9, 3e9, 100)
    # |H| slightly above one in band; the fit must scale it down
    h = 1.05 / (1 + 1j * f / 2e9)
    res = fit_rational(SampledResponse(f, h), 1, tol=0.2)
    assert res.passivity_scale < 1
    assert res.function.max_on_axis() <= 1 + 1e-9


def test_sampled_response_validation():
    with pytest.raises(ValueError):
        SampledResponse([1.0, 1.0], [0, 0])
    with pytest.raises(ValueError):
        SampledResponse([1.0, 2.0], [0, np.nan])
    r = SampledResponse([1.0, 3.0], [0.0, 2.0 + 2j])
    assert r(np.array([2.0]))[0] == 1.0 + 1j
