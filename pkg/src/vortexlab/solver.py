"""Minimization of the discrete energy: presets, meshes, continuation, multistart."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .boundary import BoundaryMap, relative_phase
from .disc import as_disc_points, mobius
from .energy import DiscreteEnergy, EnergyBreakdown, LaplacePreconditioner
from .errors import InvalidParameterError, VortexLabError
from .exact import blaschke_minimizer
from .harmonic import harmonic_extension
from .mesh import Field2D, PolarMesh
from .optimize import LBFGSOptions, OptimizeReport, lbfgs

PRESETS = ("blaschke", "harmonic", "random")


@dataclass
class SolverConfig:
    """Optimizer and initialization settings.

    ``grad_tol`` bounds sqrt(gᵀPg / E), which tracks the relative field error.
    Random starts first relax at ``continuation_start`` and then halve ε down
    to the target, since cold starts at small ε get trapped by the mesh.
    """

    grad_tol: float = 1e-7
    max_iter: int = 5000
    memory: int = 10
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40
    eps_schedule: tuple[float, ...] = ()
    continuation_start: float = 0.6
    delta_guard: float = 1e-12
    seed: int = 0
    multistart: int = 1
    init: str = "blaschke"
    recenter: int = 2

    def __post_init__(self):
        if self.grad_tol <= 0 or self.max_iter < 1 or self.memory < 1:
            raise InvalidParameterError("tolerances and iteration limits must be positive")
        if not 0 < self.armijo < 1 or not 0 < self.backtrack < 1:
            raise InvalidParameterError("line-search parameters must lie in (0, 1)")
        if not 1e-14 <= self.delta_guard <= 1e-8:
            raise InvalidParameterError("delta_guard must lie in [1e-14, 1e-8]")
        if self.init not in PRESETS:
            raise InvalidParameterError(f"init must be one of {PRESETS}")
        if self.multistart < 1:
            raise InvalidParameterError("multistart must be at least 1")

    def lbfgs_options(self) -> LBFGSOptions:
        return LBFGSOptions(self.grad_tol, self.max_iter, self.memory, self.armijo,
                            self.backtrack, self.max_backtracks)


@dataclass
class MeshSpec:
    """How to build the mesh for a solve.

    ``auto`` picks a uniform staggered mesh for degree 0 and for well separated
    zeros, and an adapted log mesh centered on the zeros when they cluster at
    one point.
    """

    kind: str = "auto"
    n_r: int = 128
    n_theta: int = 256
    r_inner: float = 0.02
    center: complex | None = None
    core_degree: int | None = None

    def __post_init__(self):
        if self.kind not in ("auto", "uniform", "log"):
            raise InvalidParameterError(f"unknown mesh kind {self.kind!r}")


CLUSTER_TOL = 1e-3


def build_mesh(g: BoundaryMap, eps: float, spec: MeshSpec | None = None,
               zeros: Sequence[complex] | None = None) -> PolarMesh:
    """Mesh for data g at the smallest ε it will be used with."""
    spec = spec or MeshSpec()
    zeros = as_disc_points(zeros) if zeros is not None else ()
    kind = spec.kind
    center = spec.center
    if center is None:
        center = complex(np.mean(zeros)) if zeros else 0j
    clustered = bool(zeros) and max(abs(z - center) for z in zeros) < CLUSTER_TOL
    if kind == "auto":
        kind = "log" if g.degree > 0 and (clustered or not zeros) else "uniform"
    if kind == "uniform":
        return PolarMesh.uniform(spec.n_r, spec.n_theta, center)
    core = spec.core_degree if spec.core_degree is not None else (g.degree if (clustered or not zeros) else 0)
    return PolarMesh.adapted(eps, spec.n_theta, center, core, spec.r_inner)


def _boundary_ring(mesh: PolarMesh, g: BoundaryMap) -> np.ndarray:
    return g(mesh.boundary_angles())


def initial_field(mesh: PolarMesh, g: BoundaryMap, eps: float, preset: str,
                  rng: np.random.Generator | None = None,
                  zeros: Sequence[complex] | None = None) -> Field2D:
    """Starting field for a solve; the boundary ring always holds exact samples of g.

    ``blaschke``: U_b e^{iψ̃}, the Blaschke minimizer for the zeros b times the
    harmonic extension of the phase of g · conj(B_b); an upper-bound competitor.
    ``harmonic``: componentwise harmonic extension of the boundary ring.
    ``random``: independent uniformly distributed unit vectors.
    """
    if preset == "blaschke":
        zeros = as_disc_points(zeros if zeros is not None else (mesh.center,) * g.degree)
        psi = harmonic_extension(relative_phase(g, zeros, 1024) if g.degree else g)

        def func(z):
            base = blaschke_minimizer(zeros, 0.0, eps, z) if zeros else 1.0
            return base * np.exp(1j * psi(z))
        return Field2D.from_function(mesh, func, eps, g)
    ring = _boundary_ring(mesh, g)
    if preset == "harmonic":
        coeffs = np.fft.fft(ring) / mesh.n_theta
        k = np.fft.fftfreq(mesh.n_theta, 1.0 / mesh.n_theta)
        powers = mesh.radii[:, None] ** np.abs(k)[None, :]
        u = np.fft.ifft(powers * coeffs[None, :] * mesh.n_theta, axis=1)
    elif preset == "random":
        rng = rng or np.random.default_rng(0)
        u = np.exp(2j * np.pi * rng.uniform(size=mesh.shape))
    else:
        raise InvalidParameterError(f"unknown preset {preset!r}")
    u[-1] = ring
    return Field2D.from_complex(mesh, u, eps, g)


@dataclass
class SolveResult:
    field: Field2D
    energy: EnergyBreakdown
    report: OptimizeReport
    stages: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def converged(self) -> bool:
        return self.report.converged

    def to_dict(self) -> dict:
        return {"energy": self.energy.to_dict(), "report": self.report.to_dict(),
                "stages": self.stages, "warnings": self.warnings,
                "resolution": {"mesh": self.field.mesh.describe()}}


def _relax(field: Field2D, eps: float, cfg: SolverConfig) -> tuple[Field2D, OptimizeReport]:
    mesh = field.mesh
    functional = DiscreteEnergy(mesh, eps, cfg.delta_guard)
    precond = LaplacePreconditioner(functional)
    ring = field.values[-1:]

    def embed(x):
        return np.concatenate([x, ring])

    def fun_grad(x):
        return functional.value_and_gradient(embed(x))

    x, report = lbfgs(fun_grad, field.values[:-1], cfg.lbfgs_options(), precond, embed)
    out = Field2D(mesh, embed(x), eps, field.boundary, dict(field.meta))
    return out, report


def _stage_schedule(eps: float, start: float | None) -> list[float]:
    stages = []
    if start is not None and start > eps:
        e = start
        while e > eps * (1 + 1e-12):
            stages.append(e)
            e *= 0.5
    return stages + [eps]


def core_offset(field: Field2D) -> complex:
    """Centroid of the core zeros in computational coordinates.

    Inside the inner ring the field is close to ρ₀ times a Blaschke product
    of degree d. The inner-ring Fourier coefficients c_k then give the zero
    sum -c_{d-1}/c_d in units of r_inner.
    """
    mesh = field.mesh
    d = mesh.core_degree
    if d < 1:
        raise InvalidParameterError("the mesh has no vortex core")
    coeffs = np.fft.fft(field.u[0]) / mesh.n_theta
    top, below = coeffs[d % mesh.n_theta], coeffs[(d - 1) % mesh.n_theta]
    if abs(top) == 0:
        return 0j
    return complex(-below / (d * top) * mesh.r_inner)


def minimize(g: BoundaryMap, eps: float, init: str | Field2D = "blaschke",
             cfg: SolverConfig | None = None, mesh: PolarMesh | None = None,
             zeros: Sequence[complex] | None = None,
             rng: np.random.Generator | None = None) -> SolveResult:
    """Minimize the discrete energy for data g at ε.

    A failure to converge within the iteration cap returns the last iterate
    with ``report.converged`` False; a failed line search raises StalledError.
    """
    cfg = cfg or SolverConfig()
    if not 0.0 < eps < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {eps}")
    t0 = time.perf_counter()
    if isinstance(init, Field2D):
        start = init.copy()
        mesh = start.mesh
        ring = _boundary_ring(mesh, g)
        if np.max(np.abs(start.u[-1] - ring)) > 1e-10:
            raise InvalidParameterError("initial field boundary ring does not match g")
        preset = "field"
    else:
        preset = init
        if mesh is None:
            mesh = build_mesh(g, eps, zeros=zeros)
        rng = rng or np.random.default_rng(cfg.seed)
        start = initial_field(mesh, g, eps, preset, rng, zeros)
    stages = []
    warnings = []
    schedule = _stage_schedule(eps, cfg.continuation_start if preset == "random" else None)
    current = start
    for e in schedule:
        current, report = _relax(current, e, cfg)
        stages.append({"eps": e, **report.to_dict()})

    for _ in range(cfg.recenter if mesh.core_degree > 0 else 0):
        offset = core_offset(current)
        if abs(offset) < 0.25 * mesh.r_inner:
            break
        center = complex(mobius(mesh.center, offset))
        warnings.append(f"core drifted by {abs(offset):.3g}; recentered mesh at {center:.6g}")
        mesh = PolarMesh(mesh.radii, mesh.n_theta, mesh.kind, center, mesh.core_degree)
        current = initial_field(mesh, g, eps, "blaschke", zeros=(center,) * mesh.core_degree)
        current, report = _relax(current, eps, cfg)
        stages.append({"eps": eps, "recentered": [center.real, center.imag], **report.to_dict()})

    if not report.converged:
        warnings.append("iteration cap reached before the gradient tolerance")
    breakdown = DiscreteEnergy(mesh, eps, cfg.delta_guard).breakdown(current.values)
    current.meta.update({"init": preset})
    return SolveResult(current, breakdown, report, stages, warnings, time.perf_counter() - t0)


def rescale_modulus(field: Field2D, eps_new: float) -> Field2D:
    """Warm start for a new ε: ρ ↦ ρ^{ε_new/ε_old} with the phase kept."""
    u = field.u
    rho = np.abs(u)
    power = eps_new / field.eps
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(rho > 0, u * rho ** (power - 1.0), 0.0)
    scaled[-1] = u[-1]
    out = Field2D.from_complex(field.mesh, scaled, eps_new, field.boundary)
    out.meta = dict(field.meta)
    return out


@dataclass
class SweepEntry:
    eps: float
    energy: EnergyBreakdown | None
    excess: float | None
    result: SolveResult | None
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"eps": self.eps, "excess": self.excess, "error": self.error}
        if self.result is not None:
            out.update(self.result.to_dict())
        return out


def continuation_sweep(g: BoundaryMap, eps_list: Sequence[float], cfg: SolverConfig | None = None,
                       mesh: PolarMesh | None = None, zeros: Sequence[complex] | None = None,
                       init: str = "blaschke") -> list[SweepEntry]:
    """Solve along a strictly decreasing ε list, each solve warm-started from the last.

    One mesh (built for the smallest ε) is shared by all entries. The excess
    total - 2πD/ε is recorded per entry; failures are recorded and the sweep
    continues from the last good field.
    """
    cfg = cfg or SolverConfig()
    eps_list = [float(e) for e in eps_list]
    if any(not 0 < e < 1 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise InvalidParameterError("eps_list must be strictly decreasing within (0, 1)")
    if mesh is None:
        mesh = build_mesh(g, min(eps_list), zeros=zeros)
    entries: list[SweepEntry] = []
    previous: Field2D | None = None
    for eps in eps_list:
        try:
            start = init if previous is None else rescale_modulus(previous, eps)
            res = minimize(g, eps, start, cfg, mesh=mesh if previous is None else None, zeros=zeros)
        except VortexLabError as exc:
            entries.append(SweepEntry(eps, None, None, None, f"{type(exc).__name__}: {exc}"))
            continue
        previous = res.field
        mesh = res.field.mesh
        excess = res.energy.total - 2 * np.pi * g.degree / eps
        entries.append(SweepEntry(eps, res.energy, excess, res))
    return entries


@dataclass
class MultistartResult:
    results: list
    pairwise_sup: np.ndarray
    best: int

    def to_dict(self) -> dict:
        return {"energies": [r.energy.total for r in self.results],
                "converged": [r.converged for r in self.results],
                "pairwise_sup": self.pairwise_sup.tolist(), "best": self.best}


def _multistart_job(args):
    g, eps, cfg, mesh, seed = args
    return minimize(g, eps, "random", replace(cfg, seed=seed), mesh=mesh,
                    rng=np.random.default_rng(seed))


def multistart(g: BoundaryMap, eps: float, cfg: SolverConfig | None = None,
               mesh: PolarMesh | None = None, jobs: int = 1) -> MultistartResult:
    """Independent random starts; disagreements are reported, not resolved."""
    cfg = cfg or SolverConfig()
    mesh = mesh or build_mesh(g, eps)
    tasks = [(g, eps, cfg, mesh, cfg.seed + k) for k in range(cfg.multistart)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_multistart_job, tasks))
    else:
        results = [_multistart_job(t) for t in tasks]
    n = len(results)
    sup = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sup[i, j] = sup[j, i] = np.max(np.abs(results[i].field.u - results[j].field.u))
    best = int(np.argmin([r.energy.total for r in results]))
    return MultistartResult(results, sup, best)
