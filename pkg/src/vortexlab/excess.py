"""Excess energy: the squared distance from g to the Blaschke traces of degree D.

Two independent routes are provided.

* direct: the H^{1/2} seminorm of the unwrapped phase of g · conj(B_b),
  minimized over the zeros b;
* formula: the renormalized-energy expression
  ∫ Φ̃₀ (g × g_τ) dτ - 2π Σ R₀(a_j) - 2π Σ_{i,j} ln|1 - a_i conj(a_j)|
  with unit degrees at the candidate zeros.

The two agree zero-set by zero-set, which is checked by ``cross_validate``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .boundary import BoundaryMap, current_density, relative_phase
from .disc import as_disc_points, hyperbolic_distance
from .errors import (
    DegreeMismatchError,
    InvalidParameterError,
    OptimizerFailureError,
    VortexLabError,
)
from .harmonic import (
    VortexConfig,
    h_half_seminorm_sq,
    neumann_phi0_tilde,
    regular_part_R0,
)

DEFAULT_SAMPLES = 1024
ROUTES = ("direct", "formula")


def _check_zero_count(g: BoundaryMap, zeros: Sequence[complex]) -> tuple[complex, ...]:
    zeros = as_disc_points(zeros)
    if len(zeros) != g.degree:
        raise DegreeMismatchError(f"{len(zeros)} zeros for boundary degree {g.degree}")
    return zeros


def excess_direct(g: BoundaryMap, zeros: Sequence[complex], n_samples: int = DEFAULT_SAMPLES) -> float:
    """Seminorm² of the relative phase of g against B_zeros."""
    zeros = _check_zero_count(g, zeros)
    return h_half_seminorm_sq(relative_phase(g, zeros, n_samples))


def _boundary_flux_integral(phi, g: BoundaryMap, n_samples: int) -> float:
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    w = np.exp(1j * theta)
    return float(2 * np.pi * np.mean(phi(w) * current_density(g, theta)))


def excess_via_formula(g: BoundaryMap, zeros: Sequence[complex],
                       n_samples: int = DEFAULT_SAMPLES) -> float:
    """Renormalized-energy expression for the excess; coincident zeros allowed."""
    zeros = _check_zero_count(g, zeros)
    config = VortexConfig.unit_degrees(zeros)
    phi = neumann_phi0_tilde(config, g)
    value = _boundary_flux_integral(phi, g, n_samples)
    pts = np.array(zeros, dtype=complex)
    if pts.size:
        value -= 2 * np.pi * float(np.sum(regular_part_R0(phi, config, pts)))
        value -= 2 * np.pi * float(np.sum(np.log(np.abs(1.0 - pts[:, None] * np.conj(pts[None, :])))))
    return value


def w_renormalized(config: VortexConfig, g: BoundaryMap, n_samples: int = DEFAULT_SAMPLES) -> float:
    """Renormalized energy W(a, d, g) for pairwise distinct points."""
    config.require_distinct()
    phi = neumann_phi0_tilde(config, g)
    value = _boundary_flux_integral(phi, g, n_samples)
    pts = np.array(config.points, dtype=complex)
    d = np.array(config.degrees, dtype=float)
    value -= 2 * np.pi * float(np.sum(d * regular_part_R0(phi, config, pts)))
    off = ~np.eye(pts.size, dtype=bool)
    pair = np.log(np.abs(pts[:, None] - pts[None, :])[off])
    value -= 2 * np.pi * float(np.sum(np.outer(d, d)[off] * pair))
    return value


def w_tilde(config: VortexConfig) -> float:
    """W̃(a, d), the part of W that does not depend on g."""
    config.require_distinct()
    pts = np.array(config.points, dtype=complex)
    d = np.array(config.degrees, dtype=float)
    dd = np.outer(d, d)
    off = ~np.eye(pts.size, dtype=bool)
    value = -2 * np.pi * float(np.sum(dd[off] * np.log(np.abs(pts[:, None] - pts[None, :])[off])))
    value += 2 * np.pi * float(np.sum(dd * np.log(np.abs(1.0 - np.conj(pts)[:, None] * pts[None, :]))))
    return value


# minimization over zero sets

@dataclass
class ExcessOptions:
    route: str = "direct"
    n_samples: int = DEFAULT_SAMPLES
    starts: int = 8
    seed: int = 0
    xatol: float = 1e-9
    fatol: float = 1e-14
    max_iter: int = 4000
    jobs: int = 1

    def __post_init__(self):
        if self.route not in ROUTES:
            raise InvalidParameterError(f"route must be one of {ROUTES}")
        if self.starts < 1 or self.jobs < 1:
            raise InvalidParameterError("starts and jobs must be positive")


@dataclass
class ExcessResult:
    """Best zero set, its excess value and a summary of the multistart."""

    zeros: tuple[complex, ...]
    value: float
    route: str
    n_samples: int
    starts: int
    converged_starts: int
    best_start: int
    spread: float
    start_values: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"zeros": [[z.real, z.imag] for z in self.zeros], "value": self.value,
                "route": self.route, "resolution": {"boundary_samples": self.n_samples},
                "trace": {"starts": self.starts, "converged_starts": self.converged_starts,
                          "best_start": self.best_start, "spread": self.spread,
                          "start_values": self.start_values}}


_MAX_S = 15.0


def _decode(x: np.ndarray) -> tuple[complex, ...]:
    s = np.clip(x[0::2], -_MAX_S, _MAX_S)
    return tuple(complex(z) for z in np.tanh(s) * np.exp(1j * x[1::2]))


def _encode(zeros: Sequence[complex]) -> np.ndarray:
    x = np.empty(2 * len(zeros))
    x[0::2] = np.arctanh(np.abs(zeros))
    x[1::2] = np.angle(zeros)
    return x


def canonical_order(zeros: Sequence[complex]) -> tuple[complex, ...]:
    """Sort by angle in [0, 2π), then by radius; points at the origin count as angle 0."""
    def key(z: complex):
        ang = 0.0 if abs(z) < 1e-12 else float(np.mod(np.angle(z), 2 * np.pi))
        return (round(ang, 9), abs(z))
    return tuple(sorted((complex(z) for z in zeros), key=key))


def starting_points(D: int, starts: int, seed: int) -> list[tuple[complex, ...]]:
    """Origin cluster, ring of radius 0.5, then random configurations."""
    ang = 2 * np.pi * np.arange(D) / D
    out = [tuple(0.05 * np.exp(1j * ang)), tuple(0.5 * np.exp(1j * (ang + 0.1)))]
    rng = np.random.default_rng(seed)
    while len(out) < starts:
        r = 0.8 * np.sqrt(rng.uniform(size=D))
        out.append(tuple(r * np.exp(2j * np.pi * rng.uniform(size=D))))
    return [tuple(complex(z) for z in c) for c in out[:starts]]


def _objective(g: BoundaryMap, route: str, n_samples: int):
    fn = excess_direct if route == "direct" else excess_via_formula

    def f(x: np.ndarray) -> float:
        try:
            return fn(g, _decode(x), n_samples)
        except VortexLabError:
            return np.inf
    return f


def _run_start(args) -> tuple[tuple[complex, ...], float, bool]:
    g, start, opt = args
    f = _objective(g, opt.route, opt.n_samples)
    res = minimize(f, _encode(start), method="Nelder-Mead",
                   options={"xatol": opt.xatol, "fatol": opt.fatol, "maxiter": opt.max_iter,
                            "maxfev": 2 * opt.max_iter, "adaptive": len(start) > 1})
    return _decode(res.x), float(res.fun), bool(res.success and np.isfinite(res.fun))


def minimize_excess(g: BoundaryMap, D: int | None = None,
                    options: ExcessOptions | None = None) -> ExcessResult:
    """Multistart simplex search for the nearest Blaschke zero set."""
    opt = options or ExcessOptions()
    D = g.degree if D is None else D
    if D != g.degree:
        raise DegreeMismatchError(f"requested degree {D}, boundary degree {g.degree}")
    if D < 1:
        raise InvalidParameterError("the Blaschke class needs degree at least 1")
    tasks = [(g, start, opt) for start in starting_points(D, opt.starts, opt.seed)]
    if opt.jobs > 1:
        with ProcessPoolExecutor(max_workers=opt.jobs) as pool:
            runs = list(pool.map(_run_start, tasks))
    else:
        runs = [_run_start(t) for t in tasks]
    values = [v for _, v, _ in runs]
    best = int(np.argmin(values))
    ok = [v for _, v, c in runs if c]
    if not ok:
        raise OptimizerFailureError("no start converged", best=runs[best])
    spread = float(max(ok) - min(ok))
    return ExcessResult(canonical_order(runs[best][0]), values[best], opt.route, opt.n_samples,
                        len(runs), len(ok), best, spread, values)


def matched_distance(x: Sequence[complex], y: Sequence[complex]) -> float:
    """Largest hyperbolic distance under the best pairing of two zero sets."""
    if len(x) != len(y):
        raise DegreeMismatchError("zero sets differ in size")
    if len(x) > 7:
        raise InvalidParameterError("matched_distance enumerates pairings; keep D <= 7")
    return min(max(hyperbolic_distance(a, b) for a, b in zip(x, perm))
               for perm in permutations(y))


@dataclass
class CrossValidation:
    direct: ExcessResult
    formula: ExcessResult
    relative_gap: float
    argmin_distance: float

    def to_dict(self) -> dict:
        return {"direct": self.direct.to_dict(), "formula": self.formula.to_dict(),
                "relative_gap": self.relative_gap, "argmin_distance": self.argmin_distance}


def cross_validate(g: BoundaryMap, D: int | None = None,
                   options: ExcessOptions | None = None) -> CrossValidation:
    """Run the minimization with both objectives and compare outcomes."""
    base = options or ExcessOptions()
    results = {}
    for route in ROUTES:
        opt = ExcessOptions(**{**base.__dict__, "route": route})
        results[route] = minimize_excess(g, D, opt)
    a, b = results["direct"], results["formula"]
    scale = max(abs(a.value), abs(b.value))
    gap = 0.0 if scale == 0.0 else abs(a.value - b.value) / scale
    return CrossValidation(a, b, gap, matched_distance(a.zeros, b.zeros))
