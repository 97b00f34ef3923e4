"""Run configuration: one TOML file with nested tables, validated by pydantic."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .boundary import BoundaryMap
from .errors import InvalidConfigError
from .excess import ExcessOptions
from .solver import MeshSpec, SolverConfig

COMMANDS = ("solve", "sweep", "excess", "exact", "thinfilm", "verify")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BoundaryBlock(_Strict):
    """Either Fourier data (degree plus (k, a_k, b_k) triples) or a Blaschke preset."""

    preset: Literal["fourier", "blaschke"] = "fourier"
    degree: Optional[int] = None
    triples: list[tuple[int, float, float]] = Field(default_factory=list)
    mean_phase: float = 0.0
    zeros: list[tuple[float, float]] = Field(default_factory=list)
    alpha: float = 0.0

    @model_validator(mode="after")
    def _consistent(self):
        if self.preset == "fourier":
            if self.degree is None:
                raise ValueError("fourier boundary data needs a degree")
            if self.zeros:
                raise ValueError("zeros belong to the blaschke preset")
        else:
            if self.triples:
                raise ValueError("the blaschke preset takes zeros, not triples")
            if self.degree is not None and self.degree != len(self.zeros):
                raise ValueError("degree must equal the number of zeros")
        return self

    def zero_list(self) -> list[complex]:
        return [complex(x, y) for x, y in self.zeros]

    def build(self) -> BoundaryMap:
        if self.preset == "blaschke":
            return BoundaryMap.from_blaschke(self.zero_list(), self.alpha)
        return BoundaryMap.from_triples(self.degree, self.triples, self.mean_phase)


class MeshBlock(_Strict):
    kind: Literal["auto", "uniform", "log"] = "auto"
    n_r: int = 128
    n_theta: int = 256
    r_inner: float = 0.02
    center: Optional[tuple[float, float]] = None
    core_degree: Optional[int] = None

    def spec(self) -> MeshSpec:
        center = None if self.center is None else complex(*self.center)
        return MeshSpec(self.kind, self.n_r, self.n_theta, self.r_inner, center, self.core_degree)


class SolverBlock(_Strict):
    grad_tol: float = 1e-7
    max_iter: int = 5000
    memory: int = 10
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40
    continuation_start: float = 0.6
    delta_guard: float = 1e-12
    multistart: int = 1
    init: Literal["blaschke", "harmonic", "random"] = "blaschke"
    recenter: int = 2

    def build(self, seed: int) -> SolverConfig:
        return SolverConfig(seed=seed, **self.model_dump())


class ExcessBlock(_Strict):
    n_samples: int = 1024
    starts: int = 8
    xatol: float = 1e-9
    fatol: float = 1e-14
    max_iter: int = 4000

    def build(self, seed: int, jobs: int, route: str = "direct") -> ExcessOptions:
        return ExcessOptions(route=route, seed=seed, jobs=jobs, **self.model_dump())


class DiagnosticsBlock(_Strict):
    enabled: bool = True
    beta: Optional[float] = None
    annulus: Optional[tuple[float, float]] = None


class ThinFilmBlock(_Strict):
    h: list[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1])
    n_z: int = 6
    tilt: float = 0.5


class VerifyBlock(_Strict):
    result: str
    field: str


class RunConfig(_Strict):
    command: Optional[Literal["solve", "sweep", "excess", "exact", "thinfilm", "verify"]] = None
    seed: int = 0
    output: str = "out"
    eps: Optional[float] = None
    eps_schedule: list[float] = Field(default_factory=list)
    boundary: Optional[BoundaryBlock] = None
    mesh: MeshBlock = Field(default_factory=MeshBlock)
    solver: SolverBlock = Field(default_factory=SolverBlock)
    excess: ExcessBlock = Field(default_factory=ExcessBlock)
    diagnostics: DiagnosticsBlock = Field(default_factory=DiagnosticsBlock)
    thinfilm: ThinFilmBlock = Field(default_factory=ThinFilmBlock)
    verify: Optional[VerifyBlock] = None

    @field_validator("eps")
    @classmethod
    def _eps_range(cls, v):
        if v is not None and not 0.0 < v < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        return v

    @field_validator("eps_schedule")
    @classmethod
    def _schedule(cls, v):
        if any(not 0.0 < e < 1.0 for e in v) or any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("eps_schedule must be strictly decreasing within (0, 1)")
        return v

    def require(self, command: str) -> None:
        """Check that the blocks ``command`` needs are present."""
        if command != "verify" and self.boundary is None:
            raise InvalidConfigError(f"command {command!r} needs a [boundary] table")
        if command in ("solve", "exact", "thinfilm", "verify") and self.eps is None:
            raise InvalidConfigError(f"command {command!r} needs eps")
        if command == "sweep" and not self.eps_schedule:
            raise InvalidConfigError("command 'sweep' needs eps_schedule")
        if command == "verify" and self.verify is None:
            raise InvalidConfigError("command 'verify' needs a [verify] table")


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a TOML run file; unknown keys are rejected."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidConfigError(f"{path}: {exc}") from exc
    return parse_config(data)


def parse_config(data: dict) -> RunConfig:
    from pydantic import ValidationError
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise InvalidConfigError(str(exc)) from exc
