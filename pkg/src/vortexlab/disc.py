"""Complex primitives on the unit disc.

Möbius automorphisms, finite Blaschke products, the hyperbolic distance and a
discrete winding number with an explicit sampling-adequacy check. Points are
plain Python/NumPy complex numbers; every public function validates that they
lie where they must.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateLoopError, InvalidParameterError, UndersampledError

#: Largest admissible angle between consecutive loop samples.
WINDING_STEP_LIMIT = np.pi / 2


def as_disc_point(a: complex, name: str = "point") -> complex:
    """Return ``a`` as a Python complex after checking ``|a| < 1``."""
    a = complex(a)
    if not np.isfinite(a.real) or not np.isfinite(a.imag) or abs(a) >= 1.0:
        raise InvalidParameterError(f"{name} must lie in the open unit disc, got {a!r}")
    return a


def as_disc_points(points: Iterable[complex], name: str = "zeros") -> tuple[complex, ...]:
    return tuple(as_disc_point(p, name) for p in points)


def unit_circle_point(theta: float | np.ndarray) -> complex | np.ndarray:
    """e^{iθ}, with modulus one by construction."""
    return np.cos(theta) + 1j * np.sin(theta)


def mobius(a: complex, z):
    """Disc automorphism M_a(z) = (z + a) / (1 + conj(a) z), sending 0 to a.

    Vectorized over ``z``.
    """
    a = as_disc_point(a, "a")
    z = np.asarray(z, dtype=complex)
    out = (z + a) / (1.0 + np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def mobius_derivative(a: complex, z):
    """dM_a/dz = (1 - |a|^2) / (1 + conj(a) z)^2."""
    a = as_disc_point(a, "a")
    z = np.asarray(z, dtype=complex)
    out = (1.0 - abs(a) ** 2) / (1.0 + np.conj(a) * z) ** 2
    return out[()] if out.ndim == 0 else out


def blaschke_eval(zeros: Sequence[complex], alpha: float, z):
    """e^{iα} Π_j (z - a_j) / (1 - conj(a_j) z), vectorized over ``z``."""
    zeros = as_disc_points(zeros)
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, np.exp(1j * alpha), dtype=complex)
    for a in zeros:
        out = out * (z - a) / (1.0 - np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def blaschke_log_derivative(zeros: Sequence[complex], z):
    """F'/F = Σ_j [1/(z - a_j) + conj(a_j)/(1 - conj(a_j) z)].

    Infinite at the zeros; callers handle those points.
    """
    zeros = as_disc_points(zeros)
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for a in zeros:
            out = out + 1.0 / (z - a) + np.conj(a) / (1.0 - np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def blaschke_derivative(zeros: Sequence[complex], alpha: float, z):
    """F'(z) computed as a sum of products, finite at the zeros."""
    zeros = as_disc_points(zeros)
    z = np.asarray(z, dtype=complex)
    factors = [(z - a) / (1.0 - np.conj(a) * z) for a in zeros]
    dfactors = [(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * z) ** 2 for a in zeros]
    out = np.zeros(z.shape, dtype=complex)
    for j in range(len(zeros)):
        term = dfactors[j]
        for k, f in enumerate(factors):
            if k != j:
                term = term * f
        out = out + term
    out = np.exp(1j * alpha) * out
    return out[()] if out.ndim == 0 else out


def hyperbolic_distance(x: complex, y: complex) -> float:
    """d_h(x, y) = artanh |M_{-x}(y)|."""
    x = as_disc_point(x, "x")
    y = as_disc_point(y, "y")
    return float(np.arctanh(abs(mobius(-x, y))))


def _as_complex_loop(samples) -> np.ndarray:
    arr = np.asarray(samples)
    if np.iscomplexobj(arr):
        loop = arr.astype(complex).ravel()
    elif arr.ndim == 2 and arr.shape[1] == 2:
        loop = arr[:, 0] + 1j * arr[:, 1]
    else:
        raise InvalidParameterError("loop samples must be complex or an (M, 2) real array")
    if loop.size < 3:
        raise UndersampledError("a loop needs at least three samples")
    return loop


def angle_increments(samples, step_limit: float = WINDING_STEP_LIMIT) -> np.ndarray:
    """Principal-branch angle increments around a cyclic loop.

    Raises when a sample vanishes or when two neighbours subtend an angle of
    at least ``step_limit``.
    """
    loop = _as_complex_loop(samples)
    if not np.all(np.isfinite(loop)):
        raise DegenerateLoopError("loop contains non-finite samples")
    if np.any(np.abs(loop) == 0.0):
        raise DegenerateLoopError("loop passes through zero")
    steps = np.angle(np.roll(loop, -1) * np.conj(loop))
    worst = np.max(np.abs(steps))
    if worst >= step_limit:
        raise UndersampledError(f"adjacent samples subtend {worst:.3f} rad >= {step_limit:.3f}")
    return steps


def winding_number(samples) -> int:
    """Degree of a sampled loop: total principal angle increment over 2π."""
    total = angle_increments(samples).sum() / (2 * np.pi)
    return int(np.rint(total))
