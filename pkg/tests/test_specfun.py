import math

import mpmath as mp
import numpy as np
import pytest

from dirac_nlcs.errors import NumericalError
from dirac_nlcs.specfun import (
    BESSEL_SWITCH,
    QuadratureError,
    QuadratureRule,
    _bessel_asymptotic_scaled,
    _bessel_series,
    bessel_i,
    hermite_derivative,
    hermite_function,
    hermite_functions,
    integrate,
    log_bessel_i,
    xi_window,
)

mp.mp.dps = 40


def mp_hermite_function(n, x):
    x = mp.mpf(x)
    return mp.hermite(n, x) * mp.exp(-x * x / 2) / mp.sqrt(mp.mpf(2) ** n * mp.factorial(n) * mp.sqrt(mp.pi))


@pytest.mark.parametrize("n,x", [(0, 0.0), (1, 0.3), (5, -2.2), (25, 3.7), (60, 7.5), (120, -14.0)])
def test_hermite_against_mpmath(n, x):
    ref = float(mp_hermite_function(n, x))
    got = hermite_function(n, x)
    assert got == pytest.approx(ref, rel=1e-11, abs=1e-300)


def test_hermite_ground_state_value():
    assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-15)


def test_hermite_no_overflow_far_out():
    vals = hermite_functions(400, np.array([0.0, 20.0, 40.0, 60.0]))
    assert np.all(np.isfinite(vals))
    # far outside the classical region every level is essentially zero
    assert np.max(np.abs(vals[:, -1])) < 1e-200
    ref = float(mp_hermite_function(400, 20.0))
    assert vals[400, 1] == pytest.approx(ref, rel=1e-9)


def test_hermite_orthonormality():
    nmax = 60
    rule = QuadratureRule(-25.0, 25.0, panels=64, order=40)
    phis = hermite_functions(nmax, rule.nodes)
    gram = (phis * rule.weights) @ phis.T
    assert np.max(np.abs(gram - np.eye(nmax + 1))) < 1e-10


def test_hermite_recurrence_consistency():
    xi = np.linspace(-6, 6, 41)
    phis = hermite_functions(30, xi)
    for n in range(1, 30):
        lhs = xi * phis[n]
        rhs = math.sqrt((n + 1) / 2) * phis[n + 1] + math.sqrt(n / 2) * phis[n - 1]
        assert np.allclose(lhs, rhs, atol=1e-13)


def test_hermite_derivative_matches_finite_difference():
    h = 1e-5
    for n in (0, 1, 4, 11):
        for x in (-1.3, 0.2, 2.7):
            fd = (hermite_function(n, x + h) - hermite_function(n, x - h)) / (2 * h)
            assert hermite_derivative(n, x) == pytest.approx(fd, abs=1e-9)


def test_hermite_rejects_negative_level():
    with pytest.raises(ValueError):
        hermite_functions(-1, 0.0)


@pytest.mark.parametrize("nu,x,ref", [(1, 2.0, 1.5906368546373291), (2, 2.0, 0.6889484476987382)])
def test_bessel_reference_values(nu, x, ref):
    assert bessel_i(nu, x) == pytest.approx(ref, rel=1e-14)


@pytest.mark.parametrize("nu", [1, 2])
@pytest.mark.parametrize("x", [0.0, 1e-8, 0.5, 7.0, 12.0, 14.999, 15.0, 22.0, 60.0, 300.0])
def test_bessel_against_mpmath(nu, x):
    ref = mp.besseli(nu, x)
    assert bessel_i(nu, x) == pytest.approx(float(ref), rel=1e-13, abs=1e-300)
    if x > 0:
        assert log_bessel_i(nu, x) == pytest.approx(float(mp.log(ref)), rel=1e-13, abs=1e-13)


def test_bessel_large_argument_in_log_space():
    x = 2000.0
    assert math.isinf(bessel_i(1, x))
    assert log_bessel_i(1, x) == pytest.approx(float(mp.log(mp.besseli(1, x))), rel=1e-14)


@pytest.mark.parametrize("nu", [1, 2])
def test_bessel_switchover_continuity(nu):
    x = BESSEL_SWITCH
    series = _bessel_series(nu, x)
    asym = _bessel_asymptotic_scaled(nu, x) * math.exp(x)
    assert asym == pytest.approx(series, rel=1e-13)


def _bessel_i0(x):
    # local series for the recurrence identity below
    term, total, k = 1.0, 1.0, 0
    while term > 1e-18 * total:
        k += 1
        term *= (x / 2) ** 2 / (k * k)
        total += term
    return total


@pytest.mark.parametrize("x", [0.7, 3.0, 9.0])
def test_bessel_derivative_identity(x):
    # I_1'(x) = I_0(x) - I_1(x)/x
    h = 1e-5
    fd = (bessel_i(1, x + h) - bessel_i(1, x - h)) / (2 * h)
    assert fd == pytest.approx(_bessel_i0(x) - bessel_i(1, x) / x, rel=1e-8)


@pytest.mark.parametrize("nu,x", [(0, 1.0), (3, 1.0), (1, -0.1), (2, math.nan)])
def test_bessel_rejects_bad_arguments(nu, x):
    with pytest.raises(ValueError):
        bessel_i(nu, x)


def test_quadrature_polynomial_exact():
    rule = QuadratureRule(0.0, 1.0, panels=1, order=10)
    assert rule.apply(lambda x: x ** 19) == pytest.approx(1 / 20, rel=1e-14)


def test_quadrature_gaussian():
    value = integrate(lambda x: np.exp(-x * x), QuadratureRule(-10.0, 10.0, panels=4))
    assert value == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_quadrature_nonconvergence_reports_estimates():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.sin(1e4 * x ** 2), QuadratureRule(0.0, 10.0, panels=1, order=4), tol=1e-14, max_panels=8)
    assert info.value.previous is not None and info.value.last is not None


def test_quadrature_nonfinite_integrand():
    with pytest.raises(NumericalError):
        QuadratureRule(0.0, 1.0).apply(lambda x: np.where(x > 0.5, np.inf, x))


def test_quadrature_rule_validation():
    with pytest.raises(ValueError):
        QuadratureRule(1.0, 0.0)
    rule = QuadratureRule(-1.0, 1.0, panels=3, order=5)
    assert rule.nodes.shape == (15,)
    assert rule.weights.sum() == pytest.approx(2.0)
    assert rule.refined().panels == 6


def test_xi_window_grows_with_level():
    assert xi_window(10) == (-25.0, 25.0)
    lo, hi = xi_window(1000)
    assert hi > math.sqrt(2001) and lo == -hi
