import numpy as np
import pytest

from vortexlab import (BoundaryMap, PolarMesh, energy, initial_field, minimize,
                       thin_film_minimize)
from vortexlab.errors import InvalidParameterError
from vortexlab.thinfilm import ThinFilmEnergy, lift_planar


def _random_values(mesh, n_z, seed):
    return np.random.default_rng(seed).normal(size=(n_z + 1,) + mesh.shape + (3,))


def test_gradient_directional_derivative():
    mesh = PolarMesh.uniform(16, 64)
    functional = ThinFilmEnergy(mesh, 0.3, 0.4, 4)
    values = _random_values(mesh, 4, 1)
    direction = _random_values(mesh, 4, 2)
    t = 1e-6
    plus, _ = functional.value_and_gradient(values + t * direction)
    minus, _ = functional.value_and_gradient(values - t * direction)
    _, grad = functional.value_and_gradient(values)
    assert float(np.sum(grad * direction)) == pytest.approx((plus - minus) / (2 * t), rel=1e-5)


def test_breakdown_sums_to_value():
    mesh = PolarMesh.uniform(16, 64)
    functional = ThinFilmEnergy(mesh, 0.3, 0.4, 4)
    values = _random_values(mesh, 4, 3)
    parts = functional.breakdown(values)
    total, _ = functional.value_and_gradient(values)
    assert parts["total"] == pytest.approx(total, rel=1e-12)
    assert parts["total"] == pytest.approx(
        parts["horizontal_dirichlet"] + parts["horizontal_modulus"] + parts["vertical"], rel=1e-14)


def test_flat_lift_has_planar_energy_and_no_vertical_term():
    mesh = PolarMesh.uniform(16, 64)
    planar = initial_field(mesh, BoundaryMap(1), 0.3, "blaschke", zeros=[0.2])
    parts = ThinFilmEnergy(mesh, 0.3, 0.1, 6).breakdown(lift_planar(planar.u, 6))
    assert parts["vertical"] == 0.0
    assert parts["total"] == pytest.approx(energy(planar).total, rel=1e-12)


def test_lift_tilt_vanishes_on_faces_and_boundary():
    mesh = PolarMesh.uniform(16, 64)
    planar = initial_field(mesh, BoundaryMap(1), 0.3, "blaschke", zeros=[0])
    lifted = lift_planar(planar.u, 4, tilt=0.5)
    assert np.all(lifted[[0, -1], ..., 2] == 0)
    assert np.all(lifted[:, -1, :, 2] == 0)
    assert lifted[2, 0, 0, 2] > 0


@pytest.mark.parametrize("kwargs", [{"n_z": 3}, {"h": 0.0}])
def test_energy_validation(kwargs):
    args = {"mesh": PolarMesh.uniform(16, 64), "eps": 0.3, "h": 0.2, "n_z": 4, **kwargs}
    with pytest.raises(InvalidParameterError):
        ThinFilmEnergy(**args)


def test_core_mesh_rejected():
    with pytest.raises(InvalidParameterError):
        ThinFilmEnergy(PolarMesh.adapted(0.3, 64, 0j, core_degree=1), 0.3, 0.2, 4)


def test_wrong_init_shape_rejected():
    mesh = PolarMesh.uniform(16, 64)
    with pytest.raises(InvalidParameterError):
        thin_film_minimize(BoundaryMap(1), 0.3, 0.2, mesh, 4, init=np.zeros((3, 17, 64, 3)))


def test_thin_film_minimum_below_planar():
    mesh = PolarMesh.uniform(16, 64)
    g = BoundaryMap(1)
    res = thin_film_minimize(g, 0.3, 0.2, mesh, 4)
    flat = thin_film_minimize(g, 0.3, 0.2, mesh, 4, tilt=0.0)
    planar = minimize(g, 0.3, "harmonic", mesh=mesh).energy.total
    assert res.report.converged
    assert np.all(res.values[[0, -1], ..., 2] == 0)
    # an in-plane start stays in-plane and reproduces the planar minimum
    assert flat.max_out_of_plane == 0.0
    assert flat.value == pytest.approx(planar, rel=1e-6)
    assert res.value <= planar + 1e-8
