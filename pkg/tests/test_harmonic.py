import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexlab import (BoundaryMap, PolarMesh, VortexConfig, blaschke_eval,
                       canonical_harmonic_map, dirichlet_phi0, h_half_seminorm_sq,
                       harmonic_extension, neumann_phi0_tilde, regular_part_R0,
                       winding_number)
from vortexlab.energy import DiscreteEnergy
from vortexlab.errors import DegreeMismatchError, InvalidConfigError, SingularityError
from vortexlab.harmonic import canonical_phase


def five_point_laplacian(f, z, h):
    return (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4 * f(z)) / h ** 2


def neumann_quadrature(flux, x, n=4096):
    """Zero-boundary-mean Neumann solution -(1/π)∫ ln|x - e^{iθ}| f(θ) dθ."""
    th = 2 * np.pi * np.arange(n) / n
    w = np.exp(1j * th)
    return -2.0 * np.mean(np.log(np.abs(x - w)) * flux(th))


def fd_dirichlet_energy(func, n_r=512, n_theta=1024):
    mesh = PolarMesh.uniform(n_r, n_theta)
    return DiscreteEnergy(mesh, 0.5).quadratic(func(mesh.points()).real)


# harmonic_extension

def test_extension_of_constant():
    f = harmonic_extension((2.5, [], []))
    assert f(0.3 + 0.2j) == pytest.approx(2.5)


def test_extension_of_cosine_is_x():
    f = harmonic_extension((0.0, [1.0], [0.0]))
    z = np.array([0.3 + 0.4j, -0.7j, 0.1])
    assert np.allclose(f(z), z.real, atol=1e-15)


def test_extension_cos2_at_half_radius():
    f = harmonic_extension((0.0, [0.0, 1.0], [0.0, 0.0]))
    assert f(0.5) == pytest.approx(0.25, abs=1e-15)
    circle = 0.5 + 0.3 * np.exp(2j * np.pi * np.arange(256) / 256)
    assert np.mean(f(circle)) == pytest.approx(0.25, abs=1e-12)


def test_extension_matches_trace_on_circle():
    g = BoundaryMap.from_triples(0, [(1, 0.2, -0.1), (4, 0.05, 0.3)], 0.4)
    th = np.linspace(0, 2 * np.pi, 77)
    assert np.allclose(harmonic_extension(g)(np.exp(1j * th)), g.phase(th), atol=1e-14)


# h_half_seminorm_sq

def test_seminorm_of_constant():
    assert h_half_seminorm_sq((5.0, [], [])) == 0.0


@pytest.mark.parametrize("coeffs,func,expected", [
    (([1.0], [0.0]), lambda z: z, np.pi),
    (([0.0, 0.0, 0.0], [0.0, 0.0, 1.0]), lambda z: -1j * z ** 3, 3 * np.pi),
])
def test_seminorm_values_and_fd_oracle(coeffs, func, expected):
    assert h_half_seminorm_sq((0.0,) + coeffs) == pytest.approx(expected, rel=1e-15)
    assert fd_dirichlet_energy(func) == pytest.approx(expected, rel=2e-3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=5),
       st.lists(st.floats(-1, 1), min_size=1, max_size=5), st.floats(-3, 3))
def test_seminorm_additive_and_quadratic(a, b, c):
    n = len(a)
    lo = (0.0, a, [0.0] * n)
    hi = (0.0, [0.0] * n + b, [0.0] * (n + len(b)))
    both = (0.0, a + b, [0.0] * (n + len(b)))
    assert h_half_seminorm_sq(both) == pytest.approx(
        h_half_seminorm_sq(lo) + h_half_seminorm_sq(hi), rel=1e-12, abs=1e-14)
    scaled = (0.0, [c * x for x in a], [0.0] * n)
    assert h_half_seminorm_sq(scaled) == pytest.approx(c * c * h_half_seminorm_sq(lo),
                                                       rel=1e-12, abs=1e-14)


# dirichlet_phi0

def test_phi0_origin_vortex():
    assert dirichlet_phi0(VortexConfig((0,), (1,)), 0.5) == pytest.approx(np.log(0.5), abs=1e-15)


def test_phi0_vanishes_on_circle():
    cfg = VortexConfig((0.3, -0.2 + 0.5j), (2, 1))
    w = np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.max(np.abs(dirichlet_phi0(cfg, w))) < 1e-14


def test_phi0_double_vortex_value_and_laplace_oracle():
    cfg = VortexConfig((0.3,), (2,))
    assert dirichlet_phi0(cfg, -0.3) == pytest.approx(2 * np.log(0.6 / 1.09), rel=1e-14)
    assert dirichlet_phi0(cfg, -0.3) == pytest.approx(-1.1939, abs=2e-4)
    lap = five_point_laplacian(lambda z: dirichlet_phi0(cfg, z), -0.3, 1e-4)
    assert abs(lap) < 1e-5


def test_phi0_singular_point():
    with pytest.raises(SingularityError):
        dirichlet_phi0(VortexConfig((0.3,), (1,)), 0.3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 0.9), st.floats(0, 2 * np.pi), st.integers(1, 3)),
                min_size=1, max_size=3),
       st.floats(0.01, 0.99), st.floats(0, 2 * np.pi))
def test_phi0_maximum_principle(vortices, r, t):
    cfg = VortexConfig(tuple(a * np.exp(1j * b) for a, b, _ in vortices),
                       tuple(d for *_, d in vortices))
    z = r * np.exp(1j * t)
    if min(abs(z - p) for p in cfg.points) < 1e-9:
        return
    assert dirichlet_phi0(cfg, z) <= 1e-14
    assert abs(dirichlet_phi0(cfg, np.exp(1j * t))) < 1e-12


# neumann_phi0_tilde

@pytest.mark.parametrize("D", [1, 2, 3])
def test_neumann_pure_degree(D):
    phi = neumann_phi0_tilde(VortexConfig((0,), (D,)), BoundaryMap(D))
    z = np.array([0.1, 0.5j, -0.3 + 0.6j])
    assert np.allclose(phi(z), D * np.log(np.abs(z)), atol=1e-14)


def test_neumann_pure_degree_numeric_oracle():
    g = BoundaryMap(2)
    phi = neumann_phi0_tilde(VortexConfig((0,), (2,)), g)
    for x in (0.2, -0.4 + 0.3j):
        h_ref = neumann_quadrature(lambda th: np.zeros_like(th), x)
        assert phi(x) - 2 * np.log(abs(x)) == pytest.approx(h_ref, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-0.3, 0.3), min_size=1, max_size=4),
       st.lists(st.floats(-0.3, 0.3), min_size=1, max_size=4),
       st.lists(st.tuples(st.floats(0, 0.8), st.floats(0, 2 * np.pi)), min_size=1, max_size=3))
def test_neumann_zero_boundary_mean(a, b, pts):
    points = tuple(r * np.exp(1j * t) for r, t in pts)
    g = BoundaryMap(len(points), a, b)
    phi = neumann_phi0_tilde(VortexConfig.unit_degrees(points), g)
    w = np.exp(2j * np.pi * np.arange(4096) / 4096)
    assert abs(np.mean(phi(w))) < 1e-9


def test_neumann_flux_integral():
    phi = neumann_phi0_tilde(VortexConfig((0.4,), (1,)), BoundaryMap(1))
    th = 2 * np.pi * np.arange(2048) / 2048
    assert 2 * np.pi * np.mean(phi.normal_derivative(th)) == pytest.approx(2 * np.pi, rel=1e-12)


def test_neumann_normal_derivative_is_current():
    g = BoundaryMap.from_triples(2, [(1, 0.2, -0.1), (3, 0.0, 0.15)])
    phi = neumann_phi0_tilde(VortexConfig((0.3, -0.5j), (1, 1)), g)
    th = np.linspace(0, 2 * np.pi, 50)
    assert np.allclose(phi.normal_derivative(th), 2 + g.residual_derivative(th), atol=1e-12)


def test_neumann_degree_mismatch():
    with pytest.raises(DegreeMismatchError):
        neumann_phi0_tilde(VortexConfig((0.1,), (1,)), BoundaryMap(2))


@pytest.mark.parametrize("h", [2e-2, 1e-2])
def test_neumann_regular_part_discrete_harmonic(h):
    g = BoundaryMap.from_triples(2, [(1, 0.2, -0.1), (2, 0.1, 0.05)])
    cfg = VortexConfig((0.3, -0.4j), (1, 1))
    phi = neumann_phi0_tilde(cfg, g)
    reg = phi.without_poles(cfg.points, cfg.degrees)
    probes = [0.0, 0.5 + 0.3j, -0.6, 0.2j]
    assert max(abs(five_point_laplacian(reg, z, h)) for z in probes) < 1e-4


def test_neumann_regular_part_laplacian_refines():
    cfg = VortexConfig((0.6,), (1,))
    reg = neumann_phi0_tilde(cfg, BoundaryMap(1)).without_poles(cfg.points, cfg.degrees)
    coarse = abs(five_point_laplacian(reg, 0.7, 4e-2))
    fine = abs(five_point_laplacian(reg, 0.7, 2e-2))
    assert coarse / fine == pytest.approx(4.0, rel=0.1)


# regular_part_R0

@pytest.mark.parametrize("D", [1, 3])
def test_R0_pure_degree_at_origin(D):
    cfg = VortexConfig((0,), (D,))
    phi = neumann_phi0_tilde(cfg, BoundaryMap(D))
    assert regular_part_R0(phi, cfg, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_R0_blaschke_half():
    cfg = VortexConfig((0.5,), (1,))
    g = BoundaryMap.from_blaschke([0.5])
    phi = neumann_phi0_tilde(cfg, g)
    h_ref = neumann_quadrature(g.residual_derivative, 0.5)
    assert regular_part_R0(phi, cfg, 0.5) == pytest.approx(np.log(0.75) + h_ref, abs=1e-10)
    # the residual flux of a Blaschke trace integrates to h = -2 ln|1 - z/2|
    assert h_ref == pytest.approx(-2 * np.log(0.75), abs=1e-10)


def test_R0_continuous_at_vortex():
    cfg = VortexConfig((0.2 - 0.3j, 0.5j), (1, 2))
    g = BoundaryMap.from_triples(3, [(1, 0.1, 0.2)])
    phi = neumann_phi0_tilde(cfg, g)
    a = cfg.points[0]
    along_x = regular_part_R0(phi, cfg, a + 1e-9)
    along_y = regular_part_R0(phi, cfg, a + 1e-9j)
    assert abs(along_x - along_y) < 1e-8
    assert abs(along_x - regular_part_R0(phi, cfg, a)) < 1e-8


# canonical_harmonic_map

def test_canonical_single_origin_vortex():
    z = np.array([0.3, -0.2 + 0.6j, 0.9j])
    u = canonical_harmonic_map(VortexConfig((0,), (1,)), BoundaryMap(1), z)
    assert np.allclose(u, z / np.abs(z), atol=1e-15)


def test_canonical_winding_around_vortex():
    cfg = VortexConfig((0.3 + 0.1j, -0.4), (2, 1))
    g = BoundaryMap.from_triples(3, [(1, 0.1, 0.0)])
    loop = cfg.points[0] + 0.05 * np.exp(2j * np.pi * np.arange(256) / 256)
    assert winding_number(canonical_harmonic_map(cfg, g, loop)) == 2


def test_canonical_boundary_trace():
    cfg = VortexConfig((0.3 + 0.1j, -0.4), (2, 1))
    g = BoundaryMap.from_triples(3, [(1, 0.1, 0.0), (2, -0.2, 0.1)], 0.5)
    th = np.linspace(0, 2 * np.pi, 200)
    assert np.max(np.abs(canonical_harmonic_map(cfg, g, np.exp(1j * th)) - g(th))) < 1e-9


def test_canonical_two_route_blaschke():
    zeros = (0.3, -0.3)
    cfg = VortexConfig(zeros, (1, 1))
    g = BoundaryMap.from_blaschke(zeros)
    rng = np.random.default_rng(7)
    z = 0.9 * np.sqrt(rng.uniform(size=64)) * np.exp(2j * np.pi * rng.uniform(size=64))
    b = blaschke_eval(zeros, 0.0, z)
    gap = np.angle(canonical_harmonic_map(cfg, g, z) * np.conj(b / np.abs(b)))
    # the modulus-induced phase -Σ arg(1 - conj(a) z) is already harmonic
    induced = -np.sum([np.angle(1 - np.conj(a) * z) for a in zeros], axis=0)
    prod = np.prod([(z - a) / np.abs(z - a) for a in zeros], axis=0)
    direct = np.angle(np.exp(1j * canonical_phase(cfg, g)(z)))
    assert np.max(np.abs(np.angle(np.exp(1j * (direct - induced))))) < 1e-6
    assert np.max(np.abs(gap)) < 1e-6
    assert np.allclose(np.exp(1j * induced) * prod, b / np.abs(b), atol=1e-12)


def test_canonical_rejects_coincident_points():
    with pytest.raises(InvalidConfigError):
        canonical_harmonic_map(VortexConfig((0.1, 0.1), (1, 1)), BoundaryMap(2), 0.5)


def test_canonical_singular_at_vortex():
    with pytest.raises(SingularityError):
        canonical_harmonic_map(VortexConfig((0.1,), (1,)), BoundaryMap(1), 0.1)


def test_canonical_current_divergence_free():
    cfg = VortexConfig((0.3 + 0.1j, -0.4), (1, 1))
    g = BoundaryMap.from_triples(2, [(1, 0.1, 0.2)])

    def u(z):
        return canonical_harmonic_map(cfg, g, z)

    def current(z, h):
        # u∧∇u as a complex vector j_x + i j_y
        ux = (u(z + h) - u(z - h)) / (2 * h)
        uy = (u(z + 1j * h) - u(z - 1j * h)) / (2 * h)
        return np.imag(np.conj(u(z)) * ux) + 1j * np.imag(np.conj(u(z)) * uy)

    def divergence(z, h):
        return ((current(z + h, h) - current(z - h, h)).real
                + (current(z + 1j * h, h) - current(z - 1j * h, h)).imag) / (2 * h)

    probes = np.array([0.0, 0.6j, -0.1 - 0.5j, 0.7])
    coarse = np.max(np.abs(divergence(probes, 1e-2)))
    fine = np.max(np.abs(divergence(probes, 5e-3)))
    assert fine < 1e-2
    assert coarse / fine == pytest.approx(4.0, rel=0.15)


def test_vortex_config_validation():
    with pytest.raises(InvalidConfigError):
        VortexConfig((0.1,), (0,))
    with pytest.raises(InvalidConfigError):
        VortexConfig((0.1, 0.2), (1,))
