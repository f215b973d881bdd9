from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class RunMetadata(BaseModel):
    """Reproducibility block embedded in every report."""

    config_hash: str
    grid: Dict[str, object]
    seed: int
    threads: int = 1
    package_version: str = ""


class SigmaOut(BaseModel):
    a: List[float]
    v: List[float]
    gamma: float
    mu: float


class FiniteTimeMember(BaseModel):
    eps: float
    horizon: float
    steps: int
    r_h1_final: float
    max_position_deviation: float
    max_velocity_deviation: float
    orth_residual_max: float
    lyapunov_gap_final: float
    mass_drift: float
    energy_drift: float
    r_linf_h1: float
    r_l2_w16: float
    sigma_final: SigmaOut
    first_wrap_time: Optional[float] = None
    status: str = "ok"
    error: str = ""
    csv_path: Optional[str] = None


class SlopeFit(BaseModel):
    slope: float
    intercept: float
    half_width: float
    expected: Optional[float] = None
    points: int


class ScalingReport(BaseModel):
    kind: str = "finite_time"
    meta: RunMetadata
    delta: float
    members: List[FiniteTimeMember]
    fit: Optional[SlopeFit] = None
    deviation_decreasing: Optional[bool] = None


class ScatteringSample(BaseModel):
    t: float
    metric: float
    sigma_dot_l1: float
    r_linf_h1: float
    r_l2_w16: float


class PostInteractionReport(BaseModel):
    kind: str = "post_interaction"
    meta: RunMetadata
    eps: float
    horizon: float
    sigma_start: SigmaOut
    sigma_plus: SigmaOut
    sigma_dot_l1: float
    sigma_dot_l1_half: float
    plateau: bool
    metric_monotone: bool
    samples: List[ScatteringSample]
    min_separation_margin: float
    first_wrap_time: Optional[float] = None
    contaminated: bool = False
    u_plus_path: Optional[str] = None


class UniformityMember(BaseModel):
    eps: float
    ratio: float
    l2t_l6x: float
    linf_l2: float
    z0_l2: float
    forcing_dual: float
    pb_l2t_l6x: float
    local_decay_v1: float
    local_decay_v2: float
    symmetry_defect: float
    free_l6_l2t: Optional[float] = None


class UniformityReport(BaseModel):
    kind: str = "charge_transfer_uniformity"
    meta: RunMetadata
    horizon: float
    members: List[UniformityMember]
    spread: float


class VerifyCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


class VerifyReport(BaseModel):
    kind: str = "verify"
    meta: RunMetadata
    checks: List[VerifyCheck] = Field(default_factory=list)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]


class SweepReport(BaseModel):
    kind: str = "sweep"
    meta: RunMetadata
    scenario: str
    reports: List[Dict[str, object]]
