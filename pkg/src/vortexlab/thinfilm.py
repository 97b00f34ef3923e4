"""Rescaled thin-film functional on B₁ × (0, 1) with ℝ³-valued fields.

For thickness h the rescaled energy is

    F̃_h(u) = ∫ (|∇_xy u|² + (1/ε² - 1)|∇_xy |u||²)
            + h⁻² ∫ (|∂_z u|² + (1/ε² - 1)|∂_z |u||²),

with u = g on the lateral boundary and u₃ = 0 on the faces z ∈ {0, 1}.
Layers are the 2D polar mesh repeated at z_k = k/N_z with trapezoid weights
in z; vertical differences use the physical node areas.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .boundary import BoundaryMap
from .energy import DiscreteEnergy
from .errors import InvalidParameterError
from .mesh import PolarMesh
from .optimize import OptimizeReport, lbfgs
from .solver import SolverConfig, minimize

MIN_LAYERS = 4


class ThinFilmEnergy:
    """F̃_h on ``n_z + 1`` node layers; arrays have shape (n_z + 1, N + 1, N_θ, 3)."""

    def __init__(self, mesh: PolarMesh, eps: float, h: float, n_z: int,
                 delta_guard: float = 1e-12):
        if mesh.core_degree != 0:
            raise InvalidParameterError("thin-film meshes must resolve the whole disc (no core)")
        if n_z < MIN_LAYERS:
            raise InvalidParameterError(f"need at least {MIN_LAYERS} layers in z")
        if h <= 0:
            raise InvalidParameterError("thickness h must be positive")
        self.mesh, self.eps, self.h, self.n_z = mesh, float(eps), float(h), int(n_z)
        self.plane = DiscreteEnergy(mesh, eps, delta_guard)
        self.stiffness = self.plane.stiffness
        self.guard = delta_guard
        dz = 1.0 / n_z
        w = np.full(n_z + 1, dz)
        w[[0, -1]] = 0.5 * dz
        self.layer_weights = w
        self.vertical = mesh.physical_area() / (dz * h * h)

    def _lw(self, ndim: int) -> np.ndarray:
        return self.layer_weights.reshape((-1,) + (1,) * (ndim - 1))

    def _vquad(self, X: np.ndarray) -> float:
        d = np.diff(X, axis=0)
        c = self.vertical if X.ndim == 3 else self.vertical[..., None]
        return float(np.sum(c * d * d))

    def _vlap(self, X: np.ndarray) -> np.ndarray:
        c = self.vertical if X.ndim == 3 else self.vertical[..., None]
        flux = c * np.diff(X, axis=0)
        out = np.zeros_like(X)
        out[:-1] -= flux
        out[1:] += flux
        return out

    def _hlap(self, X: np.ndarray) -> np.ndarray:
        return np.stack([self.plane.laplacian(layer) for layer in X])

    def breakdown(self, values: np.ndarray) -> dict:
        rho = np.sqrt(np.sum(values * values, axis=-1))
        w = self.layer_weights
        hd = sum(wk * self.plane.quadratic(v) for wk, v in zip(w, values))
        hm = self.stiffness * sum(wk * self.plane.quadratic(r) for wk, r in zip(w, rho))
        vert = self._vquad(values) + self.stiffness * self._vquad(rho)
        return {"horizontal_dirichlet": hd, "horizontal_modulus": hm, "vertical": vert,
                "total": hd + hm + vert, "h": self.h, "eps": self.eps}

    def value_and_gradient(self, values: np.ndarray) -> tuple[float, np.ndarray]:
        rho = np.sqrt(np.sum(values * values, axis=-1))
        lu = self._lw(values.ndim) * self._hlap(values) + self._vlap(values)
        lr = self._lw(rho.ndim) * self._hlap(rho) + self._vlap(rho)
        total = float(np.sum(values * lu) + self.stiffness * np.sum(rho * lr))
        unit = values / np.maximum(rho, self.guard)[..., None]
        grad = 2.0 * lu + 2.0 * self.stiffness * lr[..., None] * unit
        return total, grad


class ThinFilmPreconditioner:
    """S (2L₃)⁻¹ S with L₃ = W_z ⊗ L_xy + h⁻² L_z ⊗ A on the free nodes."""

    def __init__(self, energy: ThinFilmEnergy):
        mesh = energy.mesh
        n, m = mesh.n_r, mesh.n_theta
        nodes = n * m
        idx = np.arange(nodes).reshape(n, m)
        a, b = energy.plane.a, energy.plane.b
        diag = (2 * b[:n, None] + a[:n, None] + np.pad(a[: n - 1], (1, 0))[:, None]) * np.ones((n, m))
        rows = [idx.ravel(), idx.ravel(), np.roll(idx, -1, axis=1).ravel(),
                idx[:-1].ravel(), idx[1:].ravel()]
        cols = [idx.ravel(), np.roll(idx, -1, axis=1).ravel(), idx.ravel(),
                idx[1:].ravel(), idx[:-1].ravel()]
        wb = np.broadcast_to(-b[:n, None], (n, m)).ravel()
        wa = np.broadcast_to(-a[: n - 1, None], (n - 1, m)).ravel()
        l2 = sp.csc_matrix((np.concatenate([diag.ravel(), wb, wb, wa, wa]),
                            (np.concatenate(rows), np.concatenate(cols))), shape=(nodes, nodes))
        k = energy.n_z + 1
        lz = sp.diags([np.r_[1.0, 2 * np.ones(k - 2), 1.0], -np.ones(k - 1), -np.ones(k - 1)],
                      [0, 1, -1])
        area = sp.diags((energy.vertical[:-1]).ravel())
        l3 = sp.kron(sp.diags(energy.layer_weights), l2) + sp.kron(lz, area)
        self.lu = splu(sp.csc_matrix(l3))
        self.shape = (k, n, m)
        self.alpha = 1.0 - energy.eps

    def __call__(self, grad: np.ndarray, values: np.ndarray) -> np.ndarray:
        free = values[:, :-1]
        rho = np.sqrt(np.sum(free * free, axis=-1, keepdims=True))
        unit = np.divide(free, rho, out=np.zeros_like(free), where=rho > 0)

        def scale(x):
            return x - self.alpha * np.sum(x * unit, axis=-1, keepdims=True) * unit

        rhs = scale(grad)
        k, n, m = self.shape
        sol = 0.5 * self.lu.solve(np.ascontiguousarray(rhs.reshape(k * n * m, 3)))
        out = scale(sol.reshape(rhs.shape))
        out[[0, -1], ..., 2] = 0.0
        return out


@dataclass
class ThinFilmResult:
    h: float
    value: float
    breakdown: dict
    values: np.ndarray
    report: OptimizeReport
    max_out_of_plane: float
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"h": self.h, "value": self.value, "breakdown": self.breakdown,
                "report": self.report.to_dict(), "max_out_of_plane": self.max_out_of_plane,
                "seconds": self.seconds}


def lift_planar(u2d: np.ndarray, n_z: int, tilt: float = 0.0) -> np.ndarray:
    """z-independent ℝ³ field from a planar one; ``tilt`` adds
    tilt · sin(πz)(1 - |u|²) to u₃ so the core can leave the plane."""
    planar = np.stack([u2d.real, u2d.imag, np.zeros(u2d.shape)], axis=-1)
    out = np.repeat(planar[None], n_z + 1, axis=0)
    if tilt:
        z = np.linspace(0.0, 1.0, n_z + 1)[:, None, None]
        out[..., 2] = tilt * np.sin(np.pi * z) * (1.0 - np.abs(u2d) ** 2)[None]
        out[[0, -1], ..., 2] = 0.0
        out[:, -1, :, 2] = 0.0
    return out


def thin_film_minimize(g: BoundaryMap, eps: float, h: float, mesh: PolarMesh, n_z: int,
                       cfg: SolverConfig | None = None, init: np.ndarray | None = None,
                       tilt: float = 0.5) -> ThinFilmResult:
    """Minimize F̃_h; the default start lifts the planar minimizer on ``mesh``."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    functional = ThinFilmEnergy(mesh, eps, h, n_z, cfg.delta_guard)
    if init is None:
        planar = minimize(g, eps, "harmonic", cfg, mesh=mesh).field.u
        init = lift_planar(planar, n_z, tilt)
    init = np.array(init, dtype=float)
    if init.shape != (n_z + 1,) + mesh.shape + (3,):
        raise InvalidParameterError("initial thin-film field has the wrong shape")
    ring = init[:, -1:].copy()
    ring[..., 0:2] = np.stack([g(mesh.boundary_angles()).real, g(mesh.boundary_angles()).imag], -1)
    ring[..., 2] = 0.0
    init[[0, -1], ..., 2] = 0.0

    def embed(x):
        return np.concatenate([x, ring], axis=1)

    def fun_grad(x):
        value, grad = functional.value_and_gradient(embed(x))
        grad = grad[:, :-1]
        grad[[0, -1], ..., 2] = 0.0
        return value, grad

    precond = ThinFilmPreconditioner(functional)
    x, report = lbfgs(fun_grad, init[:, :-1], cfg.lbfgs_options(), precond, embed)
    values = embed(x)
    parts = functional.breakdown(values)
    return ThinFilmResult(h, parts["total"], parts, values, report,
                          float(np.max(np.abs(values[..., 2]))), time.perf_counter() - t0)


@dataclass
class ThinFilmSweep:
    planar_minimum: float
    results: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"planar_minimum": self.planar_minimum,
                "entries": [r.to_dict() for r in self.results]}


def _sweep_job(args):
    g, eps, h, mesh, n_z, cfg, init = args
    return thin_film_minimize(g, eps, h, mesh, n_z, cfg, init.copy())


def thin_film_sweep(g: BoundaryMap, eps: float, hs: Sequence[float], mesh: PolarMesh,
                    n_z: int, cfg: SolverConfig | None = None, jobs: int = 1,
                    tilt: float = 0.5) -> ThinFilmSweep:
    """F̃_h minima for several thicknesses next to the planar minimum on the same mesh."""
    cfg = cfg or SolverConfig()
    planar = minimize(g, eps, "harmonic", cfg, mesh=mesh)
    init = lift_planar(planar.field.u, n_z, tilt)
    tasks = [(g, eps, float(h), mesh, n_z, cfg, init) for h in hs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_job, tasks))
    else:
        results = [_sweep_job(t) for t in tasks]
    return ThinFilmSweep(planar.energy.total, results)
