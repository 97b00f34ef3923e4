"""Polar meshes of the unit disc and discrete fields living on them.

Two ring layouts share one data structure. Both have uniform angles and a
boundary ring at r = 1:

* ``uniform``: staggered radii r_i = (i + 1/2)/N_r with midpoint quadrature in
  r, so no node sits at the origin.
* ``log``: radii uniform in s = ln r between r_inner and 1. Cells then keep
  a fixed aspect ratio all the way into a vortex core. The disc inside
  r_inner is closed off analytically (see ``energy``), with ``core_degree``
  recording the winding it is assumed to carry.

A mesh may be attached to a Möbius center c: node w of the computational disc
represents the physical point M_c(w). The energy is conformally invariant, so
solving for u∘M_c on the computational disc is the same problem as solving for
u, but with the mesh concentrated around c.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundary import BoundaryMap
from .disc import as_disc_point, mobius, mobius_derivative
from .errors import InvalidParameterError, NumericError

MIN_RINGS = 16
MIN_ANGLES = 64


@dataclass(frozen=True, eq=False)
class PolarMesh:
    """Polar mesh with ring radii ``radii`` (last entry the boundary r = 1)."""

    radii: np.ndarray
    n_theta: int
    kind: str = "uniform"
    center: complex = 0j
    core_degree: int = 0

    def __post_init__(self):
        r = np.array(self.radii, dtype=float).ravel()
        if self.kind not in ("uniform", "log"):
            raise InvalidParameterError(f"unknown mesh kind {self.kind!r}")
        if r.size - 1 < MIN_RINGS:
            raise InvalidParameterError(f"need at least {MIN_RINGS} interior rings")
        if self.n_theta < MIN_ANGLES:
            raise InvalidParameterError(f"need at least {MIN_ANGLES} angles")
        if r[-1] != 1.0 or r[0] <= 0.0 or np.any(np.diff(r) <= 0.0):
            raise InvalidParameterError("radii must increase strictly from r > 0 to 1")
        if self.kind == "uniform" and self.core_degree != 0:
            raise InvalidParameterError("uniform meshes cover the origin; core_degree must be 0")
        if self.core_degree < 0:
            raise InvalidParameterError("core_degree must be nonnegative")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "n_theta", int(self.n_theta))
        object.__setattr__(self, "center", as_disc_point(self.center, "mesh center"))

    # constructors

    @classmethod
    def uniform(cls, n_r: int, n_theta: int, center: complex = 0j) -> "PolarMesh":
        """Staggered radii (i + 1/2)/n_r, i < n_r, plus the boundary ring."""
        r = np.append((np.arange(n_r) + 0.5) / n_r, 1.0)
        return cls(r, n_theta, "uniform", center, 0)

    @classmethod
    def log_polar(cls, n_theta: int, r_inner: float, n_r: int | None = None,
                  ds_max: float | None = None, center: complex = 0j,
                  core_degree: int = 0) -> "PolarMesh":
        """Rings uniform in ln r on [ln r_inner, 0].

        With ``n_r`` the ring count is fixed; otherwise the log spacing is
        the smaller of 2π/n_theta and ``ds_max``.
        """
        if not 0.0 < r_inner < 1.0:
            raise InvalidParameterError("r_inner must lie in (0, 1)")
        s_min = np.log(r_inner)
        if n_r is None:
            ds = 2 * np.pi / n_theta if ds_max is None else min(2 * np.pi / n_theta, ds_max)
            n_r = max(MIN_RINGS, int(np.ceil(-s_min / ds)))
        s = np.linspace(s_min, 0.0, n_r + 1)
        r = np.exp(s)
        r[-1] = 1.0
        return cls(r, n_theta, "log", center, core_degree)

    @classmethod
    def adapted(cls, eps: float, n_theta: int = 128, center: complex = 0j,
                core_degree: int = 0, r_inner: float = 0.02) -> "PolarMesh":
        """Log mesh fine enough to keep a degree-d core from slipping.

        A discrete phase slip across one ring step ds costs about 4πρ²/ds
        while removing the core saves about 2πdρ²/ε, so the spacing is capped
        at ε/(2d) when a core is present.
        """
        ds = 2 * np.pi / n_theta
        if core_degree > 0:
            ds = min(ds, eps / (2 * core_degree))
        return cls.log_polar(n_theta, r_inner, ds_max=ds, center=center, core_degree=core_degree)

    # geometry

    @property
    def n_r(self) -> int:
        """Number of free (interior) rings."""
        return int(self.radii.size - 1)

    @property
    def shape(self) -> tuple[int, int]:
        """Node array shape, boundary ring included."""
        return (self.radii.size, self.n_theta)

    @property
    def dtheta(self) -> float:
        return 2 * np.pi / self.n_theta

    @property
    def theta(self) -> np.ndarray:
        return self.dtheta * np.arange(self.n_theta)

    @property
    def s(self) -> np.ndarray:
        return np.log(self.radii)

    @property
    def r_inner(self) -> float:
        return float(self.radii[0])

    @property
    def spacing(self) -> float:
        """Nominal radial step: Δr for uniform meshes, Δs for log meshes."""
        if self.kind == "uniform":
            return 1.0 / self.n_r
        return float(self.s[1] - self.s[0])

    def radial_weights(self) -> np.ndarray:
        """Edge weight a_i multiplying Σ_m |X_{i+1,m} - X_{i,m}|²."""
        r = self.radii
        if self.kind == "uniform":
            mid = 0.5 * (r[1:] + r[:-1])
            return mid * self.dtheta / np.diff(r)
        return self.dtheta / np.diff(self.s)

    def angular_weights(self) -> np.ndarray:
        """Node weight b_i multiplying Σ_m |X_{i,m+1} - X_{i,m}|²."""
        r = self.radii
        if self.kind == "uniform":
            b = np.zeros(r.size)
            b[:-1] = (1.0 / self.n_r) / (r[:-1] * self.dtheta)
            return b
        s = self.s
        w = np.empty(s.size)
        w[1:-1] = 0.5 * (s[2:] - s[:-2])
        w[0] = 0.5 * (s[1] - s[0])
        w[-1] = 0.5 * (s[-1] - s[-2])
        return w / self.dtheta

    def computational_area(self) -> np.ndarray:
        """Quadrature area of each node in the computational disc, shape (N+1,)."""
        b = self.angular_weights()
        if self.kind == "uniform":
            return b * self.radii * self.dtheta * self.radii * self.dtheta
        return b * self.dtheta * self.radii ** 2 * self.dtheta

    def computational_points(self) -> np.ndarray:
        return self.radii[:, None] * np.exp(1j * self.theta)[None, :]

    def points(self) -> np.ndarray:
        """Physical node positions M_c(w), shape (N+1, N_θ)."""
        w = self.computational_points()
        return w if self.center == 0 else mobius(self.center, w)

    def conformal_factor(self) -> np.ndarray:
        """|dz/dw|² at every node."""
        if self.center == 0:
            return np.ones(self.shape)
        return np.abs(mobius_derivative(self.center, self.computational_points())) ** 2

    def physical_area(self) -> np.ndarray:
        return self.computational_area()[:, None] * self.conformal_factor()

    def cell_size(self) -> np.ndarray:
        """Physical size max(radial step, r Δθ) of the cell around each node."""
        r = self.radii
        dr = np.empty_like(r)
        dr[1:-1] = 0.5 * (r[2:] - r[:-2])
        dr[0] = r[1] - r[0]
        dr[-1] = r[-1] - r[-2]
        comp = np.maximum(dr, r * self.dtheta)[:, None]
        return comp * np.sqrt(self.conformal_factor())

    def boundary_angles(self) -> np.ndarray:
        """Physical angles of the boundary-ring nodes."""
        return np.angle(self.points()[-1])

    def describe(self) -> dict:
        return {"kind": self.kind, "n_r": self.n_r, "n_theta": self.n_theta,
                "r_inner": self.r_inner, "spacing": self.spacing,
                "center": [self.center.real, self.center.imag],
                "core_degree": self.core_degree}

    @classmethod
    def from_description(cls, desc: dict) -> "PolarMesh":
        """Rebuild a mesh from ``describe()`` output."""
        center = complex(*desc.get("center", (0.0, 0.0)))
        if desc["kind"] == "uniform":
            return cls.uniform(int(desc["n_r"]), int(desc["n_theta"]), center)
        return cls.log_polar(int(desc["n_theta"]), float(desc["r_inner"]), n_r=int(desc["n_r"]),
                             center=center, core_degree=int(desc.get("core_degree", 0)))


@dataclass(eq=False)
class Field2D:
    """ℝ²-valued nodal field; row ``-1`` is the pinned boundary ring."""

    mesh: PolarMesh
    values: np.ndarray
    eps: float
    boundary: BoundaryMap | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.mesh.shape + (2,):
            raise InvalidParameterError(f"field shape {v.shape} does not match mesh {self.mesh.shape}")
        if not np.all(np.isfinite(v)):
            raise NumericError("field values must be finite")
        self.values = v

    @classmethod
    def from_complex(cls, mesh: PolarMesh, u: np.ndarray, eps: float,
                     boundary: BoundaryMap | None = None) -> "Field2D":
        u = np.asarray(u, dtype=complex)
        return cls(mesh, np.stack([u.real, u.imag], axis=-1), eps, boundary)

    @classmethod
    def from_function(cls, mesh: PolarMesh, func, eps: float,
                      boundary: BoundaryMap | None = None) -> "Field2D":
        """Sample a complex function of the physical point; with ``boundary``
        the boundary ring is overwritten by exact samples of g."""
        u = np.asarray(func(mesh.points()), dtype=complex).copy()
        if boundary is not None:
            u[-1] = boundary(mesh.boundary_angles())
        return cls.from_complex(mesh, u, eps, boundary)

    @property
    def u(self) -> np.ndarray:
        return self.values[..., 0] + 1j * self.values[..., 1]

    @property
    def modulus(self) -> np.ndarray:
        return np.hypot(self.values[..., 0], self.values[..., 1])

    @property
    def degree(self) -> int:
        from .disc import winding_number
        return winding_number(self.u[-1])

    def copy(self) -> "Field2D":
        return Field2D(self.mesh, self.values.copy(), self.eps, self.boundary, dict(self.meta))

    def with_values(self, values: np.ndarray) -> "Field2D":
        return Field2D(self.mesh, values, self.eps, self.boundary, dict(self.meta))


def write_field_csv(field: Field2D, path: str | Path) -> None:
    """Dump r, theta, u1, u2 in row-major (ring, angle) order.

    r and theta are physical polar coordinates of each node.
    """
    z = field.mesh.points()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "theta", "u1", "u2"])
        for (i, m), zz in np.ndenumerate(z):
            u1, u2 = field.values[i, m]
            writer.writerow([repr(float(abs(zz))), repr(float(np.angle(zz))),
                             repr(float(u1)), repr(float(u2))])


def read_field_csv(path: str | Path, mesh: PolarMesh, eps: float,
                   boundary: BoundaryMap | None = None) -> Field2D:
    """Load a dump written by ``write_field_csv`` onto the mesh it came from."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape != (mesh.shape[0] * mesh.shape[1], 4):
        raise InvalidParameterError(f"dump has {data.shape[0]} rows, mesh needs {np.prod(mesh.shape)}")
    z = mesh.points().ravel()
    stored = data[:, 0] * np.exp(1j * data[:, 1])
    if np.max(np.abs(stored - z)) > 1e-9:
        raise InvalidParameterError("dump node positions do not match the mesh")
    return Field2D(mesh, data[:, 2:].reshape(mesh.shape + (2,)), eps, boundary)
