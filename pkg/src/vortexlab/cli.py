"""Batch front end: ``vortexlab --config run.toml --command solve``.

Every command writes ``result.json`` (schema_version "1") and CSV dumps into
the output directory. Exit status: 0 success, 2 configuration error,
3 numeric failure (partial artifacts are still written), 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .config import COMMANDS, RunConfig, load_config
from .diagnostics import diagnose, equipartition_ratio
from .errors import (DegreeMismatchError, InvalidConfigError, InvalidParameterError,
                     VortexLabError)
from .excess import cross_validate, minimize_excess
from .exact import ExactMinimizer, exact_energy
from .harmonic import COINCIDENCE_TOL, VortexConfig, h_half_seminorm_sq
from .energy import energy
from .mesh import Field2D, PolarMesh, read_field_csv, write_field_csv
from .solver import build_mesh, continuation_sweep, minimize, multistart
from .thinfilm import thin_film_sweep

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("vortexlab")


class NumericFailure(Exception):
    """A run finished but some solve did not converge."""


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


class Run:
    """Collects the result payload and owns every file write."""

    def __init__(self, out: Path, command: str, cfg: RunConfig):
        self.out = out
        self.payload = {"schema_version": SCHEMA_VERSION, "command": command,
                        "config": cfg.model_dump(mode="json"), "status": "running"}
        self.artifacts: list[str] = []
        self.timings: dict[str, float] = {}

    def write_field(self, name: str, field: Field2D) -> None:
        write_field_csv(field, self.out / name)
        self.artifacts.append(name)

    def write_table(self, name: str, header: list[str], rows: list[list]) -> None:
        with open(self.out / name, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(_jsonable(rows))
        self.artifacts.append(name)

    def finish(self, status: str, error: str | None = None) -> None:
        self.payload["status"] = status
        if error:
            self.payload["error"] = error
        self.payload["artifacts"] = self.artifacts + ["result.json"]
        self.payload["timings"] = self.timings
        with open(self.out / "result.json", "w") as fh:
            json.dump(_jsonable(self.payload), fh, indent=2)


def config_from_zeros(zeros) -> VortexConfig:
    """Merge coincident zeros into single points with multiplicity."""
    points, degrees = [], []
    for z in zeros:
        for i, p in enumerate(points):
            if abs(p - z) <= COINCIDENCE_TOL:
                degrees[i] += 1
                break
        else:
            points.append(complex(z))
            degrees.append(1)
    return VortexConfig(tuple(points), tuple(degrees))


def _zeros(run: Run, cfg: RunConfig, g, jobs: int):
    """Zeros for the Blaschke start and the mesh center: the preset's own
    zeros, or the excess-energy optimizer's argmin."""
    if g.degree < 1:
        return ()
    if cfg.boundary.preset == "blaschke":
        return tuple(cfg.boundary.zero_list())
    t0 = time.perf_counter()
    res = minimize_excess(g, g.degree, cfg.excess.build(cfg.seed, jobs))
    run.timings["excess"] = time.perf_counter() - t0
    run.payload["excess"] = res.to_dict()
    return res.zeros


def _diagnostics(cfg: RunConfig, field: Field2D, breakdown, zeros, g) -> dict | None:
    if not cfg.diagnostics.enabled:
        return None
    config = config_from_zeros(zeros) if zeros or g.degree == 0 else None
    report = diagnose(field, breakdown, config, cfg.diagnostics.annulus, cfg.diagnostics.beta, g)
    return report.to_dict()


def cmd_solve(run: Run, cfg: RunConfig, jobs: int) -> None:
    g = cfg.boundary.build()
    zeros = _zeros(run, cfg, g, jobs)
    solver_cfg = cfg.solver.build(cfg.seed)
    mesh = build_mesh(g, cfg.eps, cfg.mesh.spec(), zeros)
    run.payload["mesh"] = mesh.describe()
    t0 = time.perf_counter()
    res = minimize(g, cfg.eps, solver_cfg.init, solver_cfg, mesh=mesh, zeros=zeros)
    run.timings["solve"] = time.perf_counter() - t0
    run.payload["mesh"] = res.field.mesh.describe()
    run.payload["solve"] = res.to_dict()
    run.write_field("field.csv", res.field)
    if solver_cfg.multistart > 1:
        t0 = time.perf_counter()
        run.payload["multistart"] = multistart(g, cfg.eps, solver_cfg, res.field.mesh, jobs).to_dict()
        run.timings["multistart"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    run.payload["diagnostics"] = _diagnostics(cfg, res.field, res.energy, zeros, g)
    run.timings["diagnostics"] = time.perf_counter() - t0
    if not res.converged:
        raise NumericFailure("solve stopped at the iteration cap")


def cmd_sweep(run: Run, cfg: RunConfig, jobs: int) -> None:
    g = cfg.boundary.build()
    zeros = _zeros(run, cfg, g, jobs)
    solver_cfg = cfg.solver.build(cfg.seed)
    schedule = cfg.eps_schedule
    mesh = build_mesh(g, min(schedule), cfg.mesh.spec(), zeros)
    if g.degree == 0:
        ref = h_half_seminorm_sq(g)
        run.payload["reference"] = {"kind": "dirichlet_energy_of_harmonic_phase", "value": ref}
    else:
        ref = run.payload.get("excess", {}).get("value")
        if ref is None:
            from .excess import excess_direct
            ref = excess_direct(g, zeros, cfg.excess.n_samples)
        run.payload["reference"] = {"kind": "excess_energy", "value": ref,
                                    "resolution": {"boundary_samples": cfg.excess.n_samples}}
    t0 = time.perf_counter()
    entries = continuation_sweep(g, schedule, solver_cfg, mesh=mesh, zeros=zeros,
                                 init=solver_cfg.init)
    run.timings["sweep"] = time.perf_counter() - t0
    rows, out = [], []
    failed = False
    for i, entry in enumerate(entries):
        item = entry.to_dict()
        if entry.result is None:
            failed = True
            rows.append([entry.eps, None, None, None, None, None, False, entry.error])
        else:
            b = entry.energy
            failed |= not entry.result.converged
            item["diagnostics"] = _diagnostics(cfg, entry.result.field, b, zeros, g)
            rows.append([entry.eps, b.total, b.dirichlet_term, b.modulus_term, entry.excess,
                         equipartition_ratio(b), entry.result.converged, ""])
            run.write_field(f"field_{i:02d}.csv", entry.result.field)
            run.payload["mesh"] = entry.result.field.mesh.describe()
        out.append(item)
    run.payload["sweep"] = out
    run.write_table("sweep.csv", ["eps", "total", "dirichlet_term", "modulus_term", "excess",
                                  "equipartition_ratio", "converged", "error"], rows)
    if failed:
        raise NumericFailure("at least one sweep entry failed or did not converge")


def cmd_excess(run: Run, cfg: RunConfig, jobs: int) -> None:
    g = cfg.boundary.build()
    t0 = time.perf_counter()
    report = cross_validate(g, g.degree, cfg.excess.build(cfg.seed, jobs))
    run.timings["excess"] = time.perf_counter() - t0
    run.payload["excess"] = report.to_dict()
    rows = []
    for route, res in (("direct", report.direct), ("formula", report.formula)):
        rows += [[route, i, v] for i, v in enumerate(res.start_values)]
    run.write_table("excess_starts.csv", ["route", "start", "value"], rows)


def cmd_exact(run: Run, cfg: RunConfig, jobs: int) -> None:
    g = cfg.boundary.build()
    if g.degree < 1:
        raise InvalidConfigError("exact minimizers exist for degree >= 1 only")
    if cfg.boundary.preset == "blaschke":
        zeros = tuple(cfg.boundary.zero_list())
    elif g.n_modes == 0 or not (np.any(g.residual_cos) or np.any(g.residual_sin)):
        zeros = (0j,) * g.degree
    else:
        raise InvalidConfigError("exact minimizers need Blaschke boundary data")
    exact = ExactMinimizer.blaschke(zeros, cfg.eps, g.mean_phase)
    mesh = build_mesh(g, cfg.eps, cfg.mesh.spec(), zeros)
    field = Field2D.from_function(mesh, exact, cfg.eps, g)
    b = energy(field)
    run.payload["mesh"] = mesh.describe()
    run.payload["exact"] = {"zeros": list(zeros), "eps": cfg.eps,
                            "energy": exact_energy(g.degree, cfg.eps),
                            "equipartition_ratio": (1 - cfg.eps ** 2) / (1 + cfg.eps ** 2)}
    run.payload["discrete"] = {"energy": b.to_dict(), "resolution": {"mesh": mesh.describe()}}
    run.write_field("field.csv", field)
    run.payload["diagnostics"] = _diagnostics(cfg, field, b, zeros, g)


def cmd_thinfilm(run: Run, cfg: RunConfig, jobs: int) -> None:
    g = cfg.boundary.build()
    spec = cfg.mesh
    if spec.kind == "log":
        raise InvalidConfigError("thin-film runs use the uniform mesh")
    mesh = PolarMesh.uniform(spec.n_r, spec.n_theta)
    t0 = time.perf_counter()
    sweep = thin_film_sweep(g, cfg.eps, cfg.thinfilm.h, mesh, cfg.thinfilm.n_z,
                            cfg.solver.build(cfg.seed), jobs, cfg.thinfilm.tilt)
    run.timings["thinfilm"] = time.perf_counter() - t0
    run.payload["mesh"] = mesh.describe()
    run.payload["thinfilm"] = {**sweep.to_dict(),
                               "resolution": {"mesh": mesh.describe(), "n_z": cfg.thinfilm.n_z}}
    mid = cfg.thinfilm.n_z // 2
    for r in sweep.results:
        layer = r.values[mid]
        run.write_field(f"thinfilm_h{r.h:g}.csv",
                        Field2D.from_complex(mesh, layer[..., 0] + 1j * layer[..., 1], cfg.eps, g))
    if not all(r.report.converged for r in sweep.results):
        raise NumericFailure("a thin-film solve stopped at the iteration cap")


def cmd_verify(run: Run, cfg: RunConfig, jobs: int) -> None:
    with open(cfg.verify.result) as fh:
        stored = json.load(fh)
    if "mesh" not in stored:
        raise InvalidConfigError("stored result has no mesh description")
    from .boundary import BoundaryMap
    mesh = PolarMesh.from_description(stored["mesh"])
    g = cfg.boundary.build() if cfg.boundary else BoundaryMap.from_dict(stored["boundary"])
    eps = cfg.eps if cfg.eps is not None else stored["config"]["eps"]
    field = read_field_csv(cfg.verify.field, mesh, eps, g)
    zeros = [complex(*z) for z in stored.get("excess", {}).get("zeros", [])]
    if not zeros and stored["config"].get("boundary", {}).get("preset") == "blaschke":
        zeros = [complex(*z) for z in stored["config"]["boundary"]["zeros"]]
    b = energy(field)
    run.payload["mesh"] = mesh.describe()
    run.payload["energy"] = {**b.to_dict(), "resolution": {"mesh": mesh.describe()}}
    run.payload["diagnostics"] = _diagnostics(cfg, field, b, zeros, g)


HANDLERS = {"solve": cmd_solve, "sweep": cmd_sweep, "excess": cmd_excess,
            "exact": cmd_exact, "thinfilm": cmd_thinfilm, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vortexlab", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, help="TOML run file")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for parallel solves")
    p.add_argument("--seed", type=int, help="random seed (overrides the config)")
    p.add_argument("--command", choices=COMMANDS, help="command (overrides the config)")
    return p


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    except InvalidConfigError as exc:
        log.error("invalid config: %s", exc)
        return EXIT_CONFIG
    command = args.command or cfg.command
    if command is None:
        log.error("no command given on the command line or in the config")
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})
    if args.jobs < 1:
        log.error("--jobs must be positive")
        return EXIT_CONFIG
    try:
        cfg.require(command)
        out = Path(args.out or cfg.output)
        out.mkdir(parents=True, exist_ok=True)
    except InvalidConfigError as exc:
        log.error("invalid config: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot create output directory: %s", exc)
        return EXIT_IO
    job = Run(out, command, cfg)
    if cfg.boundary is not None:
        try:
            job.payload["boundary"] = cfg.boundary.build().to_dict()
        except VortexLabError as exc:
            log.error("invalid boundary data: %s", exc)
            return EXIT_CONFIG
    t0 = time.perf_counter()
    status, code, error = "ok", EXIT_OK, None
    try:
        HANDLERS[command](job, cfg, args.jobs)
    except (InvalidConfigError, InvalidParameterError, DegreeMismatchError) as exc:
        status, code, error = "config_error", EXIT_CONFIG, str(exc)
    except NumericFailure as exc:
        status, code, error = "numeric_failure", EXIT_NUMERIC, str(exc)
    except VortexLabError as exc:
        status, code, error = "numeric_failure", EXIT_NUMERIC, f"{type(exc).__name__}: {exc}"
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    job.timings["total"] = time.perf_counter() - t0
    try:
        job.finish(status, error)
    except OSError as exc:
        log.error("cannot write results: %s", exc)
        return EXIT_IO
    if error:
        log.error("%s: %s", status, error)
    return code


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
