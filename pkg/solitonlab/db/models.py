from datetime import datetime
from typing import Optional
from sqlmodel import SQLModel, Field


class GroundStateEntry(SQLModel, table=True):
    """Index row for one cached ground state; φ and ∂μφ live in the spinor checkpoint at ``path``."""

    id: Optional[int] = Field(default=None, primary_key=True)
    key: str = Field(index=True, unique=True)
    mu: float
    dim: int
    points_per_axis: int
    box_length: float
    params_json: str
    residual: float
    mass: float
    path: str
    created_at: datetime = Field(default_factory=datetime.utcnow, nullable=False)
