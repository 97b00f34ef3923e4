import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexlab import (BoundaryMap, blaschke_eval, current_density, relative_phase,
                       sample_boundary, unwrap_phase, winding_number)
from vortexlab.errors import (DegreeMismatchError, TopologicalObstructionError,
                              UndersampledError)


def boundary_maps(max_degree=3, max_modes=3, amp=0.3):
    coeffs = st.lists(st.floats(-amp, amp), min_size=0, max_size=max_modes)
    return st.builds(lambda d, a, b, m: BoundaryMap(d, a, b, m),
                     st.integers(-max_degree, max_degree), coeffs, coeffs,
                     st.floats(-np.pi, np.pi))


# sample_boundary

def test_sample_boundary_degree_one_quarter_points():
    # four samples are below the sampling floor, so evaluate g directly
    g = BoundaryMap(1)
    assert np.allclose(g(2 * np.pi * np.arange(4) / 4), [1, 1j, -1, -1j], atol=1e-15)
    with pytest.raises(UndersampledError):
        sample_boundary(g, 4)


def test_sample_boundary_degree_zero_is_constant():
    assert np.allclose(BoundaryMap(0)(2 * np.pi * np.arange(8) / 8), 1.0)
    assert np.allclose(sample_boundary(BoundaryMap(0), 64), 1.0)


def test_sample_boundary_degree_two_winding():
    g = BoundaryMap.from_triples(2, [(1, 0.1, 0.0)])
    s = sample_boundary(g, 256)
    assert winding_number(s) == 2
    assert np.allclose(np.abs(s), 1.0, atol=1e-15)


def test_sample_boundary_undersampled():
    with pytest.raises(UndersampledError):
        sample_boundary(BoundaryMap.from_triples(3, [(2, 0.1, 0.0)]), 64)


# current_density

def test_current_density_pure_degree():
    assert current_density(BoundaryMap(3), 1.234) == 3


def test_current_density_at_zero():
    g = BoundaryMap.from_triples(1, [(1, 0.1, 0.0)])
    assert current_density(g, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_current_density_at_quarter_turn():
    g = BoundaryMap.from_triples(1, [(1, 0.1, 0.0)])
    assert current_density(g, np.pi / 2) == pytest.approx(0.9, abs=1e-15)


# unwrap_phase

def test_unwrap_constant():
    assert np.allclose(unwrap_phase(np.ones(128)).samples, 0.0)


def test_unwrap_sine_phase():
    th = 2 * np.pi * np.arange(256) / 256
    trace = unwrap_phase(np.exp(0.3j * np.sin(th)))
    assert np.max(np.abs(trace.samples - 0.3 * np.sin(th))) < 1e-10


def test_unwrap_self_cancellation():
    th = 2 * np.pi * np.arange(256) / 256
    assert np.allclose(unwrap_phase(np.exp(1j * th) * np.conj(np.exp(1j * th))).samples, 0.0)


def test_unwrap_normalizes_first_sample():
    th = 2 * np.pi * np.arange(128) / 128
    trace = unwrap_phase(np.exp(1j * (-1.0 + 0.2 * np.cos(th))))
    assert 0 <= trace.samples[0] < 2 * np.pi


def test_unwrap_rejects_winding():
    with pytest.raises(TopologicalObstructionError):
        unwrap_phase(np.exp(1j * 2 * np.pi * np.arange(64) / 64))


def test_unwrap_rejects_large_gaps():
    with pytest.raises(UndersampledError):
        unwrap_phase(np.exp(1j * np.array([0.0, 2.0, 0.0, 2.0])))


# relative_phase

def test_relative_phase_blaschke_trace_is_constant():
    zeros = [0.3, -0.2 + 0.4j]
    g = BoundaryMap.from_blaschke(zeros, alpha=0.7)
    psi = relative_phase(g, zeros, 512).samples
    assert np.ptp(psi) < 1e-12


def test_relative_phase_pure_degree():
    assert np.allclose(relative_phase(BoundaryMap(1), [0], 256).samples, 0.0)


def test_relative_phase_direct_construction():
    g = BoundaryMap.from_triples(1, [(1, 0.2, 0.0)])
    th = 2 * np.pi * np.arange(512) / 512
    assert np.max(np.abs(relative_phase(g, [0], 512).samples - 0.2 * np.cos(th))) < 1e-12


def test_relative_phase_degree_mismatch():
    with pytest.raises(DegreeMismatchError):
        relative_phase(BoundaryMap(2), [0.1], 256)


def test_from_blaschke_matches_product():
    zeros = [0.5j, -0.3, 0.2 + 0.2j]
    g = BoundaryMap.from_blaschke(zeros, 0.4)
    th = np.linspace(0, 2 * np.pi, 333)
    assert np.max(np.abs(g(th) - blaschke_eval(zeros, 0.4, np.exp(1j * th)))) < 1e-13


def test_shifted_and_rotated():
    g = BoundaryMap.from_triples(2, [(1, 0.1, -0.2), (3, 0.05, 0.0)], 0.3)
    th = np.linspace(0, 2 * np.pi, 100)
    assert np.allclose(g.shifted(0.7)(th), g(th - 0.7), atol=1e-14)
    assert np.allclose(g.rotated(0.7)(th), np.exp(0.7j) * g(th), atol=1e-14)


def test_dict_round_trip():
    g = BoundaryMap.from_triples(2, [(1, 0.1, -0.2), (3, 0.05, 0.0)], 0.3)
    h = BoundaryMap.from_dict(g.to_dict())
    th = np.linspace(0, 2 * np.pi, 50)
    assert h.degree == 2 and np.allclose(g(th), h(th), atol=1e-15)


# properties

@settings(max_examples=100, deadline=None)
@given(boundary_maps(), st.integers(0, 4))
def test_degree_exact_for_all_valid_sample_counts(g, extra):
    m = max(64, 16 * (abs(g.degree) + g.n_modes)) * (1 + extra)
    assert winding_number(sample_boundary(g, m)) == g.degree


@settings(max_examples=100, deadline=None)
@given(boundary_maps())
def test_current_density_mean_is_degree(g):
    th = 2 * np.pi * np.arange(256) / 256
    assert abs(np.mean(current_density(g, th)) - g.degree) < 1e-12


@settings(max_examples=100, deadline=None)
@given(boundary_maps(max_degree=0))
def test_unwrap_round_trip(g):
    samples = sample_boundary(g, 256)
    psi = unwrap_phase(samples).samples
    assert np.max(np.abs(np.exp(1j * psi) - samples)) < 1e-12
