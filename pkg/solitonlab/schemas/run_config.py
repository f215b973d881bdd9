"""Run files: INI-style ``*.cfg`` text validated section by section.

Every section maps onto a pydantic model with ``extra="forbid"``, so unknown
keys are rejected before any compute; unknown sections are rejected by the
loader. Comma-separated values become lists.
"""
from __future__ import annotations

import configparser
import hashlib
import json
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import settings
from ..core.errors import ConfigurationError
from .params import GridSpec, GroundStateOptions, ModelParams, SigmaSpec


def _split_floats(v):
    if isinstance(v, str):
        return [float(s) for s in v.replace(";", ",").split(",") if s.strip()]
    return v


class ScenarioSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(0.02, gt=0)
    horizon: Literal["scaled", "fixed"] = "scaled"
    delta: float = 2.0
    horizon_constant: float = Field(3.0, gt=0, description="C in T = C·ε^{-δ}")
    t_end: float = Field(10.0, gt=0, description="physical horizon when horizon = fixed")
    with_potential: bool = True
    decompose_stride: int = Field(10, ge=1)
    checkpoint_stride: int = Field(0, ge=0, description="0 disables checkpoints")
    ode_dt: Optional[float] = Field(None, gt=0, description="modulation-ODE step; defaults to dt")
    soliton_margin: float = Field(8.0, ge=0)
    # post-interaction
    radiation_h1: float = Field(0.0, ge=0, description="H¹ size of the synthetic initial radiation")
    sample_times: List[float] = Field(default_factory=list, description="T grid for the scattering metric")
    separation_c1: float = 1.0
    separation_c0: float = 0.5
    # Z-system
    z_horizon: float = Field(5.0, gt=0)
    z_dt: Optional[float] = Field(None, gt=0)
    z_amplitude: float = Field(1e-3, ge=0)
    forcing_amplitude: float = Field(0.0, ge=0)
    frame: Literal["frozen", "modulation"] = "frozen"
    with_v1: bool = True
    with_v2: bool = True
    z_sample_every: int = Field(1, ge=1)

    @field_validator("sample_times", mode="before")
    @classmethod
    def _split_times(cls, v):
        return _split_floats(v)

    @model_validator(mode="after")
    def _delta_range(self):
        if self.horizon == "scaled" and not 2.0 <= self.delta <= 3.0:
            raise ValueError(f"constraint 2 <= delta <= 3 violated (delta = {self.delta})")
        return self


class SweepSection(BaseModel):
    """ε values of the sweep; empty means the single value model.eps."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    eps: List[float] = Field(default_factory=list)
    jobs: int = Field(1, ge=1)

    @field_validator("eps", mode="before")
    @classmethod
    def _split_eps(cls, v):
        return _split_floats(v)

    @field_validator("eps")
    @classmethod
    def _eps_range(cls, v: List[float]) -> List[float]:
        bad = [e for e in v if not 0.0 < e <= 1.0]
        if bad:
            raise ValueError(f"constraint 0 < eps <= 1 violated (eps = {bad[0]})")
        return v


class OutputSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    csv: bool = True
    use_cache: bool = True


class VerifySection(BaseModel):
    """Grid, sample sizes and tolerances of the invariant suites."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dim: int = 1
    points_per_axis: int = 512
    box_length: float = 40.0
    mu: float = Field(1.0, gt=0)
    samples: int = Field(5, ge=1)
    steps: int = Field(2000, ge=1)
    dt: float = Field(1e-3, gt=0)

    grid_roundtrip: float = 1e-12
    ground_residual: float = 1e-8
    mass_drift: float = 1e-12
    plane_wave: float = 1e-12
    decomposition: float = 1e-6
    root_idempotence: float = 1e-10
    h2_eta2: float = 1e-3
    z_symmetry: float = 1e-10
    checkpoint: float = 0.0
    elasticity: float = 1e-6


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    model: ModelParams = Field(default_factory=ModelParams)
    grid: GridSpec = Field(default_factory=GridSpec)
    sigma0: SigmaSpec = Field(default_factory=SigmaSpec)
    ground: GroundStateOptions = Field(default_factory=GroundStateOptions)
    scenario: ScenarioSection = Field(default_factory=ScenarioSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    output: OutputSection = Field(default_factory=OutputSection)
    verify: VerifySection = Field(default_factory=VerifySection)

    def horizon_for(self, eps: float) -> float:
        sc = self.scenario
        if sc.horizon == "fixed":
            return sc.t_end
        return sc.horizon_constant * eps ** (-sc.delta)

    def required_box(self, eps: float) -> float:
        """Box length that holds the potential support and the whole trajectory plus a soliton margin."""
        d = self.grid.dim
        a_bar = np.zeros(d)
        v_bar = np.zeros(d)
        a_bar[: min(d, len(self.sigma0.a_bar))] = self.sigma0.a_bar[:d]
        v_bar[: min(d, len(self.sigma0.v_bar))] = self.sigma0.v_bar[:d]
        a0 = a_bar / eps
        a_end = a0 + eps * v_bar * self.horizon_for(eps)
        reach = max(1.0 / eps, float(np.max(np.abs(a0))), float(np.max(np.abs(a_end))))
        return 2.0 * (reach + self.scenario.soliton_margin)

    def eps_values(self) -> list[float]:
        return list(self.sweep.eps) or [self.model.eps]

    def resolution_problems(self, eps_values: Optional[List[float]] = None) -> list[str]:
        dx = self.grid.box_length / self.grid.points_per_axis
        problems = []
        for eps in (self.eps_values() if eps_values is None else eps_values):
            need = self.required_box(eps)
            if self.grid.box_length < need:
                problems.append(f"constraint box_length >= {need:.4g} violated for eps = {eps} "
                                 f"(box_length = {self.grid.box_length})")
            if self.scenario.with_potential and (1.0 / eps) / dx < 8:
                problems.append(f"constraint potential width 1/eps >= 8 grid spacings violated for eps = {eps} "
                                 f"(dx = {dx:.4g})")
        return problems

    @model_validator(mode="after")
    def _resolvable(self):
        # an empty sweep is checked by the scenario drivers against model.eps
        if self.sweep.eps:
            problems = self.resolution_problems()
            if problems:
                raise ValueError("; ".join(problems))
        return self

    def check_resolvable(self, eps_values: Optional[List[float]] = None) -> None:
        problems = self.resolution_problems(eps_values)
        if problems:
            raise ConfigurationError("; ".join(problems))

    def config_hash(self) -> str:
        return config_hash(self)


def config_hash(cfg: BaseModel) -> str:
    """SHA-256 of the canonical JSON dump of a validated config."""
    text = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


SECTIONS = tuple(RunConfig.model_fields)


def parse_run_config(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc
    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigurationError(f"{source}: unknown section(s) {', '.join(unknown)}; "
                                 f"allowed: {', '.join(SECTIONS)}")
    data = {name: dict(parser.items(name)) for name in parser.sections()}
    return RunConfig.model_validate(data)


def load_run_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_run_config(text, source=str(path))
