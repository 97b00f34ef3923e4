"""Closed-form minimizers: the radial vortex and the Blaschke minimizer.

For Blaschke data F = e^{iα} Π (z - a_j)/(1 - conj(a_j) z) the minimizer is
U = |F|^ε F/|F|, with energy 2πD/ε for every ε. Values and gradients are
evaluated analytically so that comparisons against the mesh solver isolate
discretization error.

ℝ²-valued quantities are returned as complex numbers u1 + i u2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .disc import as_disc_points, blaschke_derivative, blaschke_eval
from .errors import DomainError, InvalidParameterError


def _check_eps(eps: float, upper_open: bool = True) -> float:
    eps = float(eps)
    if not (eps > 0.0 and (eps < 1.0 or not upper_open)):
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {eps}")
    return eps


def exact_energy(D: int, eps: float) -> float:
    """Minimal energy 2πD/ε for Blaschke data of degree D."""
    if int(D) != D or D < 1:
        raise InvalidParameterError(f"degree must be a positive integer, got {D}")
    if not eps > 0.0:
        raise InvalidParameterError(f"epsilon must be positive, got {eps}")
    return 2.0 * np.pi * D / eps


def radial_profile(D: int, eps: float, R: float, r):
    """(r/R)^{Dε} on [0, R]."""
    if int(D) != D or D < 1:
        raise InvalidParameterError(f"degree must be a positive integer, got {D}")
    eps = _check_eps(eps)
    r = np.asarray(r, dtype=float)
    if R <= 0 or np.any(r < 0.0) or np.any(r > R):
        raise DomainError(f"radius must lie in [0, R={R}]")
    out = (r / R) ** (D * eps)
    return out[()] if out.ndim == 0 else out


def blaschke_minimizer(zeros: Sequence[complex], alpha: float, eps: float, z):
    """U(z) = |F(z)|^ε F(z)/|F(z)|, zero at the zeros of F."""
    eps = _check_eps(eps)
    z = np.asarray(z, dtype=complex)
    f = blaschke_eval(zeros, alpha, z)
    mod = np.abs(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(mod > 0.0, f * mod ** (eps - 1.0), 0.0)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class ExactMinimizer:
    """Closed-form minimizer of a given kind.

    ``radial``: (r/R)^{Dε} e^{i(Dθ + α)} with D = len(zeros), zeros all at 0.
    ``blaschke``: |F|^ε F/|F| for the listed zeros and phase α.
    """

    kind: str
    zeros: tuple[complex, ...]
    eps: float
    R: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("radial", "blaschke"):
            raise InvalidParameterError(f"unknown exact minimizer kind {self.kind!r}")
        zeros = as_disc_points(self.zeros)
        if len(zeros) < 1:
            raise InvalidParameterError("an exact minimizer needs at least one zero")
        if self.kind == "radial" and any(a != 0 for a in zeros):
            raise InvalidParameterError("radial minimizers have all zeros at the origin")
        if self.kind == "blaschke" and self.R != 1.0:
            raise InvalidParameterError("Blaschke minimizers live on the unit disc")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "eps", _check_eps(self.eps))

    @classmethod
    def radial(cls, D: int, eps: float, R: float = 1.0, alpha: float = 0.0) -> "ExactMinimizer":
        return cls("radial", (0j,) * D, eps, R, alpha)

    @classmethod
    def blaschke(cls, zeros: Sequence[complex], eps: float, alpha: float = 0.0) -> "ExactMinimizer":
        return cls("blaschke", tuple(zeros), eps, 1.0, alpha)

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def energy(self) -> float:
        return exact_energy(self.degree, self.eps)

    def _f(self, z):
        """The holomorphic generator F and F' (scaled by 1/R for the radial case)."""
        w = z / self.R
        f = blaschke_eval(self.zeros, self.alpha, w)
        df = blaschke_derivative(self.zeros, self.alpha, w) / self.R
        return f, df

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        f, _ = self._f(z)
        mod = np.abs(f)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(mod > 0.0, f * mod ** (self.eps - 1.0), 0.0)
        return out[()] if out.ndim == 0 else out

    def modulus(self, z):
        f, _ = self._f(np.asarray(z, dtype=complex))
        return np.abs(f) ** self.eps

    def gradient(self, z):
        """(∂_x U, ∂_y U), each as a complex number u1 + i u2."""
        z = np.asarray(z, dtype=complex)
        f, df = self._f(z)
        mod = np.abs(f)
        e = self.eps
        with np.errstate(divide="ignore", invalid="ignore"):
            dz = 0.5 * (1.0 + e) * df * mod ** (e - 1.0)
            dzbar = 0.5 * (e - 1.0) * mod ** (e - 3.0) * f * f * np.conj(df)
        return dz + dzbar, 1j * (dz - dzbar)

    def modulus_gradient(self, z):
        """ρ_x + i ρ_y for ρ = |F|^ε."""
        z = np.asarray(z, dtype=complex)
        f, df = self._f(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.eps * np.abs(f) ** (self.eps - 2.0) * f * np.conj(df)

    def phase_gradient(self, z):
        """φ_x + i φ_y for φ = arg F."""
        z = np.asarray(z, dtype=complex)
        f, df = self._f(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1j * np.conj(df / f)

    def energy_density(self, z):
        """|∇U|² + (1/ε² - 1)|∇ρ|² at z."""
        ux, uy = self.gradient(z)
        grho = self.modulus_gradient(z)
        c = 1.0 / self.eps ** 2 - 1.0
        return np.abs(ux) ** 2 + np.abs(uy) ** 2 + c * np.abs(grho) ** 2
