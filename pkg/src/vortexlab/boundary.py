"""Boundary data g: ∂B₁ → S¹ stored as an exact degree plus a Fourier phase.

``g(θ) = exp(i(mean_phase + Dθ + η(θ)))`` with
``η(θ) = Σ_k a_k cos kθ + b_k sin kθ``. Because the degree is an integer field
rather than something inferred from samples, it can never be corrupted by
rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .disc import angle_increments, as_disc_points, blaschke_eval, winding_number
from .errors import (
    DegreeMismatchError,
    InvalidParameterError,
    TopologicalObstructionError,
    UndersampledError,
)


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BoundaryMap:
    """S¹-valued boundary datum of exact degree ``degree``.

    ``residual_cos[k-1]`` and ``residual_sin[k-1]`` hold a_k and b_k.
    """

    degree: int
    residual_cos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    residual_sin: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mean_phase: float = 0.0

    def __post_init__(self):
        if int(self.degree) != self.degree:
            raise InvalidParameterError("degree must be an integer")
        a = _frozen(self.residual_cos, "residual_cos")
        b = _frozen(self.residual_sin, "residual_sin")
        n = max(a.size, b.size)
        a = _frozen(np.pad(a, (0, n - a.size)), "residual_cos")
        b = _frozen(np.pad(b, (0, n - b.size)), "residual_sin")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "residual_cos", a)
        object.__setattr__(self, "residual_sin", b)
        object.__setattr__(self, "mean_phase", float(self.mean_phase))
        if not np.isfinite(self.mean_phase):
            raise InvalidParameterError("mean_phase must be finite")

    # construction helpers

    @classmethod
    def from_triples(cls, degree: int, triples: Sequence[Sequence[float]] = (),
                     mean_phase: float = 0.0) -> "BoundaryMap":
        """Build from (k, a_k, b_k) triples; repeated k accumulate."""
        kmax = max((int(t[0]) for t in triples), default=0)
        a = np.zeros(kmax)
        b = np.zeros(kmax)
        for k, ak, bk in triples:
            if int(k) != k or k < 1:
                raise InvalidParameterError(f"mode index must be a positive integer, got {k}")
            a[int(k) - 1] += ak
            b[int(k) - 1] += bk
        return cls(degree, a, b, mean_phase)

    @classmethod
    def from_blaschke(cls, zeros: Sequence[complex], alpha: float = 0.0,
                      n_modes: int | None = None, tol: float = 1e-17) -> "BoundaryMap":
        """Exact phase series of the trace of e^{iα} Π (z - a_j)/(1 - conj(a_j) z).

        Each zero a = |a|e^{iβ} contributes 2 Σ_k |a|^k sin(k(θ - β))/k to the
        residual phase. Without ``n_modes`` the series is cut where |a|^k < tol.
        """
        zeros = as_disc_points(zeros)
        radii = [abs(a) for a in zeros]
        if n_modes is None:
            rmax = max(radii, default=0.0)
            n_modes = 0 if rmax == 0.0 else int(np.ceil(np.log(tol) / np.log(rmax)))
        k = np.arange(1, n_modes + 1)
        a = np.zeros(n_modes)
        b = np.zeros(n_modes)
        for zero, r in zip(zeros, radii):
            if r == 0.0:
                continue
            beta = np.angle(zero)
            amp = 2.0 * r ** k / k
            a -= amp * np.sin(k * beta)
            b += amp * np.cos(k * beta)
        return cls(len(zeros), a, b, alpha)

    # basic properties

    @property
    def n_modes(self) -> int:
        """Truncation order K of the residual series."""
        return int(self.residual_cos.size)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.n_modes + 1)

    def residual(self, theta) -> np.ndarray:
        """η(θ) without the constant term."""
        theta = np.asarray(theta, dtype=float)
        kt = np.multiply.outer(theta, self.modes)
        return np.cos(kt) @ self.residual_cos + np.sin(kt) @ self.residual_sin

    def residual_derivative(self, theta) -> np.ndarray:
        """η'(θ)."""
        theta = np.asarray(theta, dtype=float)
        k = self.modes
        kt = np.multiply.outer(theta, k)
        return np.cos(kt) @ (k * self.residual_sin) - np.sin(kt) @ (k * self.residual_cos)

    def phase(self, theta) -> np.ndarray:
        """Lifted phase mean_phase + Dθ + η(θ)."""
        theta = np.asarray(theta, dtype=float)
        return self.mean_phase + self.degree * theta + self.residual(theta)

    def __call__(self, theta) -> np.ndarray:
        """g(θ) as a complex number of modulus one."""
        ph = self.phase(theta)
        return np.cos(ph) + 1j * np.sin(ph)

    # transformations

    def rotated(self, sigma: float) -> "BoundaryMap":
        """The datum e^{iσ} g."""
        return BoundaryMap(self.degree, self.residual_cos, self.residual_sin,
                           self.mean_phase + sigma)

    def shifted(self, sigma: float) -> "BoundaryMap":
        """The datum θ ↦ g(θ - σ)."""
        k = self.modes
        c, s = np.cos(k * sigma), np.sin(k * sigma)
        a, b = self.residual_cos, self.residual_sin
        return BoundaryMap(self.degree, a * c - b * s, a * s + b * c,
                           self.mean_phase - self.degree * sigma)

    def scaled_residual(self, factor: float) -> "BoundaryMap":
        return BoundaryMap(self.degree, factor * self.residual_cos,
                           factor * self.residual_sin, self.mean_phase)

    # serialization

    def to_dict(self) -> dict:
        triples = [[int(k), float(a), float(b)]
                   for k, a, b in zip(self.modes, self.residual_cos, self.residual_sin)
                   if a != 0.0 or b != 0.0]
        return {"degree": self.degree, "residual": triples, "mean_phase": self.mean_phase}

    @classmethod
    def from_dict(cls, data: dict) -> "BoundaryMap":
        return cls.from_triples(data["degree"], data.get("residual", ()),
                                data.get("mean_phase", 0.0))


@dataclass(frozen=True, eq=False)
class PhaseTrace:
    """Continuous real phase sampled at M uniform angles 2πm/M."""

    samples: np.ndarray
    periodicity_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen(self.samples, "samples"))

    @property
    def size(self) -> int:
        return int(self.samples.size)

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    def fourier(self) -> tuple[float, np.ndarray, np.ndarray]:
        """(mean, a_k, b_k) of the trigonometric interpolant, k = 1..M//2."""
        m = self.size
        spec = np.fft.rfft(self.samples) / m
        a = 2.0 * spec[1:].real
        b = -2.0 * spec[1:].imag
        if m % 2 == 0:
            a[-1] *= 0.5
            b[-1] = 0.0
        return float(spec[0].real), a, b


def sample_boundary(g: BoundaryMap, n_samples: int) -> np.ndarray:
    """g at the angles 2πm/M; requires M >= max(64, 16(|D| + K))."""
    need = max(64, 16 * (abs(g.degree) + g.n_modes))
    if n_samples < need:
        raise UndersampledError(f"M={n_samples} below the required {need}")
    return g(2 * np.pi * np.arange(n_samples) / n_samples)


def current_density(g: BoundaryMap, theta) -> np.ndarray:
    """Tangential phase derivative g × g_τ = D + η'(θ)."""
    out = g.degree + g.residual_derivative(theta)
    return out[()] if np.ndim(out) == 0 else out


def unwrap_phase(samples) -> PhaseTrace:
    """Lift a degree-zero sampled loop to a continuous phase with ψ_0 in [0, 2π)."""
    arr = np.asarray(samples)
    if not np.iscomplexobj(arr) and arr.ndim == 2 and arr.shape[1] == 2:
        loop = arr[:, 0] + 1j * arr[:, 1]
    else:
        loop = arr.astype(complex).ravel()
    steps = angle_increments(loop)
    degree = winding_number(loop)
    if degree != 0:
        raise TopologicalObstructionError(f"cannot lift a loop of degree {degree}")
    start = np.mod(np.angle(loop[0]), 2 * np.pi)
    psi = start + np.concatenate(([0.0], np.cumsum(steps[:-1])))
    return PhaseTrace(psi, 0.0)


def relative_phase(g: BoundaryMap, zeros: Sequence[complex], n_samples: int = 1024) -> PhaseTrace:
    """Unwrapped phase of g · conj(B_zeros) on the unit circle."""
    zeros = as_disc_points(zeros)
    if len(zeros) != g.degree:
        raise DegreeMismatchError(f"{len(zeros)} zeros for boundary degree {g.degree}")
    if n_samples < 8:
        raise UndersampledError("relative phase needs at least 8 samples")
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    w = np.exp(1j * theta)
    return unwrap_phase(g(theta) * np.conj(blaschke_eval(zeros, 0.0, w)))
