from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelParams(BaseModel):
    """Exponents, saturation constant, potential scaling and bump height."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = 1.2
    r: float = 1.6
    theta: float = 0.1
    eps: float = 1.0
    v0: float = 1.0

    @field_validator("p")
    @classmethod
    def _p_range(cls, v: float) -> float:
        if not 1.0 < v < 4.0 / 3.0:
            raise ValueError(f"constraint 1 < p < 4/3 violated (p = {v})")
        return v

    @field_validator("theta", "v0")
    @classmethod
    def _positive(cls, v: float, info) -> float:
        if not v > 0:
            raise ValueError(f"constraint {info.field_name} > 0 violated ({info.field_name} = {v})")
        return v

    @field_validator("eps")
    @classmethod
    def _eps_range(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError(f"constraint 0 < eps <= 1 violated (eps = {v})")
        return v

    @model_validator(mode="after")
    def _degree_bookkeeping(self):
        if not 7.0 / 3.0 < self.r + self.p <= 4.0:
            raise ValueError(f"constraint 7/3 < r + p <= 4 violated (r + p = {self.r + self.p})")
        return self

    def with_eps(self, eps: float) -> "ModelParams":
        return self.model_copy(update={"eps": eps})


class GridSpec(BaseModel):
    """Cubic periodic box; the default resolves the μ = 1 core with 8+ points across its half-max radius."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dim: int = 3
    points_per_axis: int = 128
    box_length: float = 10.0

    @field_validator("dim")
    @classmethod
    def _dim_range(cls, v: int) -> int:
        if v not in (1, 2, 3):
            raise ValueError(f"constraint dim in {{1, 2, 3}} violated (dim = {v})")
        return v

    @field_validator("points_per_axis")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if v < 8 or v & (v - 1):
            raise ValueError(f"constraint points_per_axis = 2^k >= 8 violated (points_per_axis = {v})")
        return v

    @field_validator("box_length")
    @classmethod
    def _positive_box(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"constraint box_length > 0 violated (box_length = {v})")
        return v


class GroundStateOptions(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tol: float = Field(1e-8, gt=0, description="residual tolerance relative to ‖μφ‖")
    max_iter: int = Field(20000, gt=0, description="total gradient-flow iterations")
    max_secant: int = Field(40, gt=0)
    flow_tol: float = Field(1e-4, gt=0, description="residual at which the gradient flow hands over to Newton")
    max_newton: int = Field(20, gt=0)
    dtau: float = Field(1.0, gt=0, description="initial pseudo-time step")
    h_mu: Optional[float] = Field(None, gt=0, description="μ step for ∂μφ; default 1e-3·μ")
    min_points_across_radius: float = Field(8.0, gt=0, description="grid points across the half-max radius")
    collapse_mass: float = Field(1e-10, gt=0)


class DecomposeOptions(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tol: float = 1e-12
    max_iter: int = 50
    max_halvings: int = 30
    cond_limit: float = 1e12


class SigmaSpec(BaseModel):
    """Unscaled soliton parameters (ā₀, ῡ₀, γ₀, μ₀) from the run file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a_bar: List[float] = [-1.5, 0.0, 0.0]
    v_bar: List[float] = [1.0, 0.0, 0.0]
    gamma: float = 0.0
    mu: float = Field(1.0, gt=0)

    @field_validator("a_bar", "v_bar", mode="before")
    @classmethod
    def _split(cls, v):
        if isinstance(v, str):
            return [float(s) for s in v.replace(";", ",").split(",") if s.strip()]
        return v
