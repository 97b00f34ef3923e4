"""Discrete energy E_ε on a polar mesh, its exact gradient and a preconditioner.

With radial edge weights a_i and angular node weights b_i from the mesh, the
Dirichlet part is the weighted graph quadratic form

    Q(X) = Σ_i a_i Σ_m |X_{i+1,m} - X_{i,m}|² + Σ_i b_i Σ_m |X_{i,m+1} - X_{i,m}|²,

and E = Q(u) + (1/ε² - 1) Q(|u|) + core term. For log meshes with a core of
degree d the disc inside r_inner is replaced by the exact minimal energy of a
degree-d vortex with the inner-ring modulus: (2πd/ε) · mean_m |u_{0,m}|². That
is exact for Blaschke-shaped inner data with the zeros anywhere in the core,
and its first variation matches that of a power-law core.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import InvalidParameterError, NumericError
from .mesh import Field2D, PolarMesh

DEFAULT_DELTA_GUARD = 1e-12


@dataclass(frozen=True)
class EnergyBreakdown:
    """The two energy summands, their sum and the ε they were computed at."""

    dirichlet_term: float
    modulus_term: float
    total: float
    eps: float

    def to_dict(self) -> dict:
        return asdict(self)


class DiscreteEnergy:
    """Energy functional on one mesh at one ε; arrays have shape (N+1, N_θ, n)."""

    def __init__(self, mesh: PolarMesh, eps: float, delta_guard: float = DEFAULT_DELTA_GUARD):
        if not 0.0 < eps < 1.0:
            raise InvalidParameterError(f"epsilon must lie in (0, 1), got {eps}")
        if not 1e-14 <= delta_guard <= 1e-8:
            raise InvalidParameterError("delta_guard must lie in [1e-14, 1e-8]")
        self.mesh = mesh
        self.eps = float(eps)
        self.delta_guard = float(delta_guard)
        self.stiffness = 1.0 / eps ** 2 - 1.0
        self.a = mesh.radial_weights()
        self.b = mesh.angular_weights()
        core = 2 * np.pi * mesh.core_degree / (eps * mesh.n_theta)
        self.core_dirichlet = 0.5 * core * (1.0 + eps ** 2)
        self.core_modulus = 0.5 * core * (1.0 - eps ** 2)

    # quadratic form and its Laplacian

    def _expand(self, w: np.ndarray, ndim: int) -> np.ndarray:
        return w.reshape((-1,) + (1,) * (ndim - 1))

    def quadratic(self, X: np.ndarray) -> float:
        dr = np.diff(X, axis=0)
        dt = np.roll(X, -1, axis=1) - X
        a = self._expand(self.a, X.ndim)
        b = self._expand(self.b, X.ndim)
        return float(np.sum(a * dr * dr) + np.sum(b * dt * dt))

    def laplacian(self, X: np.ndarray) -> np.ndarray:
        """Graph Laplacian L with Q(X) = <X, L X>; all rows returned."""
        a = self._expand(self.a, X.ndim)
        b = self._expand(self.b, X.ndim)
        flux = a * np.diff(X, axis=0)
        out = b * (2 * X - np.roll(X, 1, axis=1) - np.roll(X, -1, axis=1))
        out[:-1] -= flux
        out[1:] += flux
        return out

    # energy and gradient

    def _check(self, values: np.ndarray) -> None:
        if not np.all(np.isfinite(values)):
            raise NumericError("non-finite field values")

    def breakdown(self, values: np.ndarray) -> EnergyBreakdown:
        self._check(values)
        rho = np.sqrt(np.sum(values * values, axis=-1))
        core = float(np.sum(rho[0] ** 2))
        ed = self.quadratic(values) + self.core_dirichlet * core
        em = self.stiffness * self.quadratic(rho) + self.core_modulus * core
        return EnergyBreakdown(ed, em, ed + em, self.eps)

    def value_and_gradient(self, values: np.ndarray) -> tuple[float, np.ndarray]:
        """Total energy and its exact gradient on the free rows (all but the last)."""
        self._check(values)
        rho = np.sqrt(np.sum(values * values, axis=-1))
        lu = self.laplacian(values)
        lr = self.laplacian(rho)
        core = self.core_dirichlet + self.core_modulus
        total = float(np.sum(values * lu) + self.stiffness * np.sum(rho * lr)
                      + core * np.sum(rho[0] ** 2))
        unit = values / np.maximum(rho, self.delta_guard)[..., None]
        grad = 2.0 * lu + 2.0 * self.stiffness * lr[..., None] * unit
        grad[0] += 2.0 * core * values[0]
        return total, grad[:-1]


def energy(field: Field2D, delta_guard: float = DEFAULT_DELTA_GUARD) -> EnergyBreakdown:
    """Discrete energy of a field."""
    return DiscreteEnergy(field.mesh, field.eps, delta_guard).breakdown(field.values)


def energy_gradient(field: Field2D, delta_guard: float = DEFAULT_DELTA_GUARD) -> np.ndarray:
    """Exact gradient of the discrete energy with respect to the free rows."""
    return DiscreteEnergy(field.mesh, field.eps, delta_guard).value_and_gradient(field.values)[1]


class LaplacePreconditioner:
    """Inverse of an approximate Hessian built from the mesh Laplacian.

    The Hessian is about 2L along the phase direction and 2L/ε² along the
    modulus direction, so applying S (2L)^{-1} S with S = I - (1 - ε) û ûᵀ
    rescales both. L is factorized once with SuperLU, with the boundary ring
    eliminated (Dirichlet).
    """

    def __init__(self, energy: DiscreteEnergy, extra_diagonal: np.ndarray | None = None):
        mesh = energy.mesh
        n, m = mesh.n_r, mesh.n_theta
        idx = np.arange(n * m).reshape(n, m)
        a, b = energy.a, energy.b
        diag = np.zeros((n, m))
        diag += 2 * b[:n, None]
        diag[:, :] += a[:n, None]
        diag[1:, :] += a[: n - 1, None]
        diag[0] += energy.core_dirichlet + energy.core_modulus
        if extra_diagonal is not None:
            diag += extra_diagonal
        rows = [idx.ravel()]
        cols = [idx.ravel()]
        vals = [diag.ravel()]
        right = np.roll(idx, -1, axis=1)
        wb = np.broadcast_to(-b[:n, None], (n, m))
        rows += [idx.ravel(), right.ravel()]
        cols += [right.ravel(), idx.ravel()]
        vals += [wb.ravel(), wb.ravel()]
        wa = np.broadcast_to(-a[: n - 1, None], (n - 1, m))
        rows += [idx[:-1].ravel(), idx[1:].ravel()]
        cols += [idx[1:].ravel(), idx[:-1].ravel()]
        vals += [wa.ravel(), wa.ravel()]
        mat = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                            shape=(n * m, n * m))
        self.shape = (n, m)
        self.lu = splu(mat)
        self.alpha = 1.0 - energy.eps

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """(2L)^{-1} applied componentwise to an (N, N_θ, n) array."""
        n, m = self.shape
        flat = rhs.reshape(n * m, -1)
        return 0.5 * self.lu.solve(np.ascontiguousarray(flat)).reshape(rhs.shape)

    def __call__(self, grad: np.ndarray, values: np.ndarray) -> np.ndarray:
        free = values[:-1]
        rho = np.sqrt(np.sum(free * free, axis=-1, keepdims=True))
        unit = np.divide(free, rho, out=np.zeros_like(free), where=rho > 0)
        alpha = self.alpha

        def scale(x):
            return x - alpha * np.sum(x * unit, axis=-1, keepdims=True) * unit

        return scale(self.solve(scale(grad)))
