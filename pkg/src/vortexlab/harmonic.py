"""Spectral harmonic functions on the unit disc.

Everything here is closed form: Fourier modes are extended by r^k and the
logarithmic Green terms are evaluated directly, so these evaluators can serve
as machine-precision references for the mesh solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boundary import BoundaryMap, PhaseTrace
from .disc import as_disc_point
from .errors import DegreeMismatchError, InvalidConfigError, SingularityError

#: Pairwise distance below which two vortex points count as coincident.
COINCIDENCE_TOL = 1e-9


@dataclass(frozen=True)
class VortexConfig:
    """Points a_j in the open disc carrying positive integer degrees d_j."""

    points: tuple[complex, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(as_disc_point(p, "vortex point") for p in self.points)
        degs = tuple(int(d) for d in self.degrees)
        if len(pts) != len(degs):
            raise InvalidConfigError("points and degrees differ in length")
        if any(d < 1 or d != dd for d, dd in zip(degs, self.degrees)):
            raise InvalidConfigError("vortex degrees must be positive integers")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "degrees", degs)

    @classmethod
    def unit_degrees(cls, points: Sequence[complex]) -> "VortexConfig":
        """One degree-one vortex per listed point (repeats allowed)."""
        return cls(tuple(points), (1,) * len(points))

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    def min_separation(self) -> float:
        pts = np.array(self.points, dtype=complex)
        if pts.size < 2:
            return np.inf
        diff = np.abs(pts[:, None] - pts[None, :])
        return float(diff[~np.eye(pts.size, dtype=bool)].min())

    def require_distinct(self) -> None:
        if self.min_separation() <= COINCIDENCE_TOL:
            raise InvalidConfigError("vortex points must be pairwise distinct")


@dataclass(frozen=True, eq=False)
class HarmonicFunction:
    """mean + Σ r^k(a_k cos kθ + b_k sin kθ) + log terms.

    ``poles`` holds (p, c) for c·ln|z - p| with p inside the disc; ``reflected``
    holds (p, c) for c·ln|1 - conj(p) z|, which is smooth on the closed disc.
    """

    mean: float = 0.0
    cos_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    poles: tuple[tuple[complex, float], ...] = ()
    reflected: tuple[tuple[complex, float], ...] = ()

    def __post_init__(self):
        a = np.asarray(self.cos_coeffs, dtype=float).ravel()
        b = np.asarray(self.sin_coeffs, dtype=float).ravel()
        n = max(a.size, b.size)
        object.__setattr__(self, "cos_coeffs", np.pad(a, (0, n - a.size)))
        object.__setattr__(self, "sin_coeffs", np.pad(b, (0, n - b.size)))
        object.__setattr__(self, "mean", float(self.mean))

    @property
    def n_modes(self) -> int:
        return int(self.cos_coeffs.size)

    def _series(self, z: np.ndarray) -> np.ndarray:
        if self.n_modes == 0:
            return np.zeros(z.shape, dtype=complex)
        coeffs = np.concatenate(([0.0], self.cos_coeffs - 1j * self.sin_coeffs))
        return np.polynomial.polynomial.polyval(z, coeffs)

    def _series_derivative(self, z: np.ndarray) -> np.ndarray:
        if self.n_modes == 0:
            return np.zeros(z.shape, dtype=complex)
        k = np.arange(1, self.n_modes + 1)
        return np.polynomial.polynomial.polyval(z, k * (self.cos_coeffs - 1j * self.sin_coeffs))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.mean + self._series(z).real
        for p, c in self.poles:
            dist = np.abs(z - p)
            if np.any(dist == 0.0):
                raise SingularityError(f"evaluation at logarithmic pole {p}")
            out = out + c * np.log(dist)
        for p, c in self.reflected:
            out = out + c * np.log(np.abs(1.0 - np.conj(p) * z))
        return out[()] if out.ndim == 0 else out

    def gradient(self, z):
        """∂_x f + i ∂_y f as a complex number."""
        z = np.asarray(z, dtype=complex)
        out = np.conj(self._series_derivative(z))
        for p, c in self.poles:
            out = out + c / np.conj(z - p)
        for p, c in self.reflected:
            out = out - c * p / (1.0 - p * np.conj(z))
        return out[()] if out.ndim == 0 else out

    def normal_derivative(self, theta):
        """∂_r f on the unit circle at angle θ."""
        theta = np.asarray(theta, dtype=float)
        w = np.exp(1j * theta)
        return (np.conj(w) * self.gradient(w)).real

    def without_poles(self, points: Sequence[complex], coeffs: Sequence[float]) -> "HarmonicFunction":
        """Subtract Σ c_j ln|z - p_j| from the pole list."""
        remaining = {}
        for p, c in self.poles:
            remaining[p] = remaining.get(p, 0.0) + c
        for p, c in zip(points, coeffs):
            match = next((q for q in remaining if abs(q - p) <= COINCIDENCE_TOL), None)
            if match is None:
                raise SingularityError(f"no pole at {p} to remove")
            remaining[match] -= c
        poles = tuple((p, c) for p, c in remaining.items() if c != 0.0)
        return HarmonicFunction(self.mean, self.cos_coeffs, self.sin_coeffs, poles, self.reflected)


def _coefficients(trace) -> tuple[float, np.ndarray, np.ndarray]:
    if isinstance(trace, PhaseTrace):
        return trace.fourier()
    if isinstance(trace, HarmonicFunction):
        return trace.mean, trace.cos_coeffs, trace.sin_coeffs
    if isinstance(trace, BoundaryMap):
        if trace.degree != 0:
            raise DegreeMismatchError("only degree-zero data has a single-valued phase")
        return trace.mean_phase, trace.residual_cos, trace.residual_sin
    mean, a, b = trace
    return float(mean), np.asarray(a, dtype=float), np.asarray(b, dtype=float)


def harmonic_extension(trace) -> HarmonicFunction:
    """Harmonic extension of a boundary trace.

    Accepts a PhaseTrace, a degree-zero BoundaryMap, a HarmonicFunction (its
    series part) or a ``(mean, a_k, b_k)`` tuple.
    """
    mean, a, b = _coefficients(trace)
    return HarmonicFunction(mean, a, b)


def h_half_seminorm_sq(trace) -> float:
    """∫_{B₁}|∇ψ̃|² = π Σ k(a_k² + b_k²)."""
    _, a, b = _coefficients(trace)
    k = np.arange(1, a.size + 1)
    return float(np.pi * np.sum(k * (a * a + b * b)))


def dirichlet_phi0(config: VortexConfig, z):
    """Φ₀(z) = Σ d_j ln(|z - a_j| / |1 - conj(a_j) z|)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape)
    for a, d in zip(config.points, config.degrees):
        dist = np.abs(z - a)
        if np.any(dist == 0.0):
            raise SingularityError(f"Φ₀ is singular at the vortex point {a}")
        out = out + d * np.log(dist / np.abs(1.0 - np.conj(a) * z))
    return out[()] if out.ndim == 0 else out


def neumann_phi0_tilde(config: VortexConfig, g: BoundaryMap) -> HarmonicFunction:
    """Φ̃₀ with ∂_ν Φ̃₀ = g × g_τ on ∂B₁ and zero boundary mean.

    The log pair ln|z - a_j| + ln|1 - conj(a_j) z| has unit normal derivative
    on the circle, so the vortices carry the flux D; the residual flux
    η' = Σ_k A_k cos kθ + B_k sin kθ is supplied by Σ r^k(A_k cos kθ + B_k sin kθ)/k.
    """
    if config.total_degree != g.degree:
        raise DegreeMismatchError(
            f"vortex degrees sum to {config.total_degree}, boundary degree is {g.degree}")
    k = g.modes
    flux_cos = k * g.residual_sin
    flux_sin = -k * g.residual_cos
    poles = tuple((a, float(d)) for a, d in zip(config.points, config.degrees))
    reflected = tuple((a, float(d)) for a, d in zip(config.points, config.degrees) if a != 0)
    return HarmonicFunction(0.0, flux_cos / k if k.size else flux_cos,
                            flux_sin / k if k.size else flux_sin, poles, reflected)


def regular_part_R0(phi0_tilde: HarmonicFunction, config: VortexConfig, x):
    """R₀(x) = Φ̃₀(x) - Σ d_j ln|x - a_j|, smooth at the vortex points."""
    return phi0_tilde.without_poles(config.points, config.degrees)(x)


def canonical_phase(config: VortexConfig, g: BoundaryMap, tol: float = 1e-17) -> HarmonicFunction:
    """Harmonic φ̃ with e^{iφ} = g Π (|e^{iθ} - a_j| / (e^{iθ} - a_j))^{d_j} on ∂B₁.

    arg(e^{iθ} - a) = θ + Σ_k |a|^k sin(k(θ - β))/k for a = |a|e^{iβ}, so the
    boundary phase is an explicit Fourier series; it is cut once |a|^k < tol.
    """
    if config.total_degree != g.degree:
        raise DegreeMismatchError(
            f"vortex degrees sum to {config.total_degree}, boundary degree is {g.degree}")
    rmax = max((abs(a) for a in config.points), default=0.0)
    n_vortex = 0 if rmax == 0.0 else int(np.ceil(np.log(tol) / np.log(rmax)))
    n = max(g.n_modes, n_vortex)
    a = np.pad(g.residual_cos, (0, n - g.n_modes))
    b = np.pad(g.residual_sin, (0, n - g.n_modes))
    k = np.arange(1, n + 1)
    for p, d in zip(config.points, config.degrees):
        r = abs(p)
        if r == 0.0:
            continue
        beta = np.angle(p)
        amp = d * r ** k / k
        a = a + amp * np.sin(k * beta)
        b = b - amp * np.cos(k * beta)
    return HarmonicFunction(g.mean_phase, a, b)


def canonical_harmonic_map(config: VortexConfig, g: BoundaryMap, z):
    """u₀(z) = e^{iφ̃(z)} Π ((z - a_j)/|z - a_j|)^{d_j} as a unit complex number."""
    config.require_distinct()
    z = np.asarray(z, dtype=complex)
    out = np.exp(1j * canonical_phase(config, g)(z))
    for p, d in zip(config.points, config.degrees):
        diff = z - p
        mod = np.abs(diff)
        if np.any(mod == 0.0):
            raise SingularityError(f"canonical map is undefined at the vortex {p}")
        out = out * (diff / mod) ** d
    return out[()] if out.ndim == 0 else out
