import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_nlcs.fockalg import IDENTITY, SHIFTED_ONE, SHIFTED_TWO, DeformationFamily
from dirac_nlcs.nlcs import (
    SeriesDivergence,
    build_state,
    closed_form_norm,
    eigen_residual,
    occupation_distribution,
    poisson_pmf,
    total_variation,
)

FAMILIES = (IDENTITY, SHIFTED_ONE, SHIFTED_TWO)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.kind)
def test_zero_eigenvalue_is_lowest_basis_state(family):
    state = build_state(family, 0.0)
    expected = np.zeros(family.lowest_level + 1)
    expected[-1] = 1.0
    assert np.array_equal(state.coeffs, expected)
    assert state.tail_bound == 0.0
    assert eigen_residual(state) == 0.0


def test_identity_coefficients_against_mpmath():
    state = build_state(IDENTITY, 2.0)
    s = mp.mpf(4)
    norm2 = 1 / (2 * mp.e ** s - 1)
    probs = np.abs(state.coeffs) ** 2
    assert probs[0] == pytest.approx(float(norm2), rel=1e-13)
    for n in range(1, 20):
        ref = 2 * s ** n / mp.factorial(n) * norm2
        assert probs[n] == pytest.approx(float(ref), rel=1e-12)


def test_coefficient_phases_follow_alpha():
    alpha = 1.5 * cmath.exp(0.9j)
    state = build_state(SHIFTED_ONE, alpha, delta=0.2)
    a = state.coeffs
    for n in range(2, 8):
        assert cmath.phase(a[n] / a[n - 1]) == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.kind)
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("phi", [0.0, math.pi / 4, math.pi / 2])
@pytest.mark.parametrize("delta", [0.0, math.pi / 3])
def test_eigen_residual(family, r, phi, delta):
    state = build_state(family, r * cmath.exp(1j * phi), delta)
    assert eigen_residual(state) < 1e-9


def test_residual_at_larger_dimension():
    state = build_state(SHIFTED_TWO, 3.0 + 1.0j, 0.4)
    assert eigen_residual(state, state.dim + 40) < 1e-9
    with pytest.raises(ValueError):
        eigen_residual(state, state.dim)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.kind)
def test_delta_enters_through_alpha_tilde(family):
    alpha, delta = 2.0 * cmath.exp(0.3j), 0.8
    a = build_state(family, alpha, delta)
    b = build_state(family, alpha * cmath.exp(-1j * delta), 0.0)
    assert np.allclose(a.coeffs, b.coeffs, atol=1e-15)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f.kind)
@pytest.mark.parametrize("r", [1e-3, 0.5, 1.0, 2.5, 4.0, 6.0, 8.0])
def test_closed_form_normalization(family, r):
    state = build_state(family, r)
    assert abs(state.recursion_norm - closed_form_norm(family, r)) < 1e-10
    assert np.sum(np.abs(state.coeffs) ** 2) + state.tail_bound == pytest.approx(1.0, abs=1e-14)


def test_closed_form_norm_mpmath():
    r = mp.mpf(3)
    assert closed_form_norm(SHIFTED_TWO, 3.0) == pytest.approx(float(mp.sqrt(r / mp.besseli(1, 2 * r))), rel=1e-13)
    assert closed_form_norm(IDENTITY, 3.0) == pytest.approx(float(1 / mp.sqrt(2 * mp.e ** 9 - 1)), rel=1e-13)
    assert closed_form_norm(DeformationFamily.custom([1.0] * 5), 1.0) is None


def test_large_alpha_stays_finite():
    state = build_state(IDENTITY, 25.0)
    assert np.all(np.isfinite(state.coeffs))
    assert np.sum(np.abs(state.coeffs) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_truncation_tracks_tolerance():
    loose = build_state(IDENTITY, 3.0, tol=1e-6)
    tight = build_state(IDENTITY, 3.0, tol=1e-13)
    assert loose.dim < tight.dim
    assert tight.tail_bound < loose.tail_bound
    with pytest.raises(ValueError):
        build_state(IDENTITY, 1.0, tol=0.1)


def test_custom_family_matching_identity():
    table = [1.0] * 200
    a = build_state(DeformationFamily.custom(table), 1.2)
    b = build_state(IDENTITY, 1.2)
    n = min(a.dim, b.dim)
    assert np.allclose(a.coeffs[:n], b.coeffs[:n], atol=1e-12)


def test_custom_family_too_short_diverges():
    with pytest.raises(SeriesDivergence) as info:
        build_state(DeformationFamily.custom([1.0] * 6), 3.0)
    assert info.value.partial_mass > 0


def test_shifted_one_is_shifted_poisson():
    for r in (0.5, 2.0, 5.0):
        occ = occupation_distribution(build_state(SHIFTED_ONE, r))
        ref = poisson_pmf(r * r, occ.levels, shift=1)
        assert np.max(np.abs(occ.probabilities - ref)) < 1e-14


def test_shifted_two_is_sub_poissonian():
    occ = occupation_distribution(build_state(SHIFTED_TWO, 5.0))
    ref = poisson_pmf(25.0, occ.levels, shift=2)
    assert total_variation(occ.probabilities, ref) > 0.05
    mean = np.dot(occ.levels, occ.probabilities)
    var = np.dot(occ.levels ** 2, occ.probabilities) - mean ** 2
    assert var < mean - 2


def test_identity_close_to_poisson_above_ground():
    occ = occupation_distribution(build_state(IDENTITY, 5.0))
    levels = occ.levels[1:]
    assert total_variation(occ.probabilities[1:], poisson_pmf(25.0, levels)) < 0.05


def test_poisson_pmf_sums_to_one():
    levels = np.arange(200)
    assert poisson_pmf(30.0, levels).sum() == pytest.approx(1.0, abs=1e-14)
    assert np.array_equal(poisson_pmf(0.0, np.arange(3)), [1.0, 0.0, 0.0])
    assert np.array_equal(poisson_pmf(1.0, np.arange(2), shift=2), [0.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(
    family=st.sampled_from(FAMILIES),
    r=st.floats(0.0, 7.0),
    phi=st.floats(-math.pi, math.pi),
    delta=st.floats(-math.pi, math.pi),
)
def test_states_are_normalized_eigenvectors(family, r, phi, delta):
    state = build_state(family, r * cmath.exp(1j * phi), delta)
    assert np.sum(np.abs(state.coeffs) ** 2) + state.tail_bound == pytest.approx(1.0, abs=1e-13)
    assert np.all(state.coeffs[: family.lowest_level] == 0)
    assert eigen_residual(state) < 1e-9
