from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexlab import (ExactMinimizer, blaschke_minimizer, exact_energy, mobius,
                       radial_profile)
from vortexlab.errors import DomainError, InvalidParameterError

rng = np.random.default_rng(3)
PROBES = 0.95 * np.sqrt(rng.uniform(size=200)) * np.exp(2j * np.pi * rng.uniform(size=200))


# radial_profile

def test_radial_profile_endpoints():
    assert radial_profile(2, 0.3, 0.7, 0.7) == 1.0
    assert radial_profile(2, 0.3, 0.7, 0.0) == 0.0


def test_radial_profile_value_extended_precision():
    getcontext().prec = 40
    ref = float(Decimal("0.5") ** Decimal("0.1"))
    assert radial_profile(1, 0.1, 1.0, 0.5) == pytest.approx(ref, rel=1e-15)
    assert ref == pytest.approx(0.93303, abs=1e-5)


@pytest.mark.parametrize("r", [-0.1, 1.5])
def test_radial_profile_domain(r):
    with pytest.raises(DomainError):
        radial_profile(1, 0.5, 1.0, r)


# blaschke_minimizer

def test_blaschke_minimizer_single_origin_zero():
    z = np.array([0.3, 0.5j, -0.2 - 0.7j])
    r = np.abs(z)
    assert np.allclose(blaschke_minimizer([0], 0.0, 0.37, z), r ** 0.37 * z / r, atol=1e-15)


def test_blaschke_minimizer_unit_on_circle():
    w = np.exp(1j * np.linspace(0, 2 * np.pi, 50))
    assert np.allclose(np.abs(blaschke_minimizer([0.3, -0.5j], 0.4, 0.2, w)), 1.0, atol=1e-14)


def test_blaschke_minimizer_symmetric_pair():
    assert blaschke_minimizer([0.5, -0.5], 0.0, 0.2, 0) == pytest.approx(-0.25 ** 0.2, abs=1e-15)
    assert -0.25 ** 0.2 == pytest.approx(-0.7579, abs=1e-4)


def test_blaschke_minimizer_zero_vector_at_zero():
    assert blaschke_minimizer([0.3], 0.0, 0.5, 0.3) == 0


# exact_energy

@pytest.mark.parametrize("D,eps,expected", [
    (1, 1.0, 2 * np.pi), (3, 0.1, 60 * np.pi), (2, 0.5, 8 * np.pi)])
def test_exact_energy(D, eps, expected):
    assert exact_energy(D, eps) == pytest.approx(expected, rel=1e-15)


def test_exact_energy_validation():
    with pytest.raises(InvalidParameterError):
        exact_energy(0, 0.5)
    with pytest.raises(InvalidParameterError):
        exact_energy(1, 0.0)


# ExactMinimizer closed forms

def test_gradient_matches_finite_differences():
    ex = ExactMinimizer.blaschke([0.3, -0.2 + 0.4j], 0.3, 0.5)
    z = np.array([0.6, -0.5j, 0.1 + 0.1j])
    h = 1e-6
    ux, uy = ex.gradient(z)
    assert np.allclose(ux, (ex(z + h) - ex(z - h)) / (2 * h), atol=1e-6)
    assert np.allclose(uy, (ex(z + 1j * h) - ex(z - 1j * h)) / (2 * h), atol=1e-6)


def test_modulus_gradient_matches_finite_differences():
    ex = ExactMinimizer.blaschke([0.3, -0.2 + 0.4j], 0.3)
    z = np.array([0.6, -0.5j])
    h = 1e-6
    gx = (ex.modulus(z + h) - ex.modulus(z - h)) / (2 * h)
    gy = (ex.modulus(z + 1j * h) - ex.modulus(z - 1j * h)) / (2 * h)
    assert np.allclose(ex.modulus_gradient(z), gx + 1j * gy, atol=1e-6)


def test_radial_kind_matches_profile():
    ex = ExactMinimizer.radial(2, 0.4, R=0.8, alpha=0.3)
    z = 0.5 * np.exp(0.7j)
    assert abs(ex(z)) == pytest.approx(radial_profile(2, 0.4, 0.8, 0.5), rel=1e-14)
    assert np.angle(ex(z)) == pytest.approx(2 * 0.7 + 0.3, abs=1e-14)


def test_exact_minimizer_validation():
    with pytest.raises(InvalidParameterError):
        ExactMinimizer("radial", (0.1,), 0.5)
    with pytest.raises(InvalidParameterError):
        ExactMinimizer.blaschke([], 0.5)


# properties

zero_sets = st.lists(st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 0.9),
                               st.floats(0, 2 * np.pi)), min_size=1, max_size=3)


@settings(max_examples=60, deadline=None)
@given(zero_sets, st.floats(0.05, 0.95))
def test_cauchy_schwarz_saturation(zeros, eps):
    ex = ExactMinimizer.blaschke(zeros, eps)
    z = PROBES[np.min(np.abs(PROBES[:, None] - np.array(zeros)[None, :]), axis=1) > 0.05]
    lhs = np.abs(ex.modulus_gradient(z)) / eps
    rhs = ex.modulus(z) * np.abs(ex.phase_gradient(z))
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(zero_sets, st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 0.8),
                            st.floats(0, 2 * np.pi)), st.floats(0.05, 0.95))
def test_conformal_covariance(zeros, a, eps):
    pulled = [mobius(-a, z) for z in zeros]
    lhs = blaschke_minimizer(zeros, 0.0, eps, mobius(a, PROBES))
    rhs = blaschke_minimizer(pulled, 0.0, eps, PROBES)
    keep = np.abs(rhs) > 1e-3
    phase = lhs[keep] * np.conj(rhs[keep]) / np.abs(rhs[keep]) ** 2
    assert np.max(np.abs(lhs - rhs * phase[0])) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.floats(0, 2 * np.pi), st.floats(0.05, 0.95))
def test_radial_equivariance(D, sigma, eps):
    ex = ExactMinimizer.blaschke([0] * D, eps)
    assert np.allclose(ex(np.exp(1j * sigma) * PROBES), np.exp(1j * D * sigma) * ex(PROBES),
                       atol=1e-13)
