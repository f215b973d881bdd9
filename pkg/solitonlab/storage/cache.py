"""Ground-state cache indexed in the SQLModel table.

Each entry is an NLSS spinor checkpoint (φ, ∂μφ) plus a scalar sidecar with
∂²μφ, so a hit rebuilds exactly the profile expansion of a fresh solve.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

from sqlalchemy.engine import Engine

from ..core.config import settings
from ..core.errors import CheckpointError
from ..core.grid import Grid, spinor
from ..core.logging import logger
from ..db.crud import create_entry, get_entry
from ..db.models import GroundStateEntry
from ..db.session import get_session, init_db
from ..schemas.params import GroundStateOptions, ModelParams
from ..services.ground_state import GroundState, equation_residual, radial_defect, solve_ground_state
from .checkpoint import read_checkpoint, write_checkpoint

log = logger.getChild("cache")

RESIDUAL_RECHECK_RTOL = 1e-6


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=float)


def cache_key(mu: float, grid: Grid, params: ModelParams) -> str:
    """SHA-256 of (μ, grid, p, r, θ); φ_μ does not depend on ε or the bump height."""
    payload = {
        "mu": float(mu),
        "grid": {"dim": grid.dim, "points_per_axis": grid.points_per_axis,
                 "box_length": [float(L) for L in grid.box_length]},
        "model": {"p": params.p, "r": params.r, "theta": params.theta},
    }
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


class GroundStateCache:
    def __init__(self, directory: str | Path | None = None, engine: Optional[Engine] = None):
        self.directory = Path(directory or settings.CACHE_DIR)
        self.engine = init_db(engine)

    def path_for(self, key: str) -> Path:
        return self.directory / f"ground_{key[:16]}.nlss"

    def second_derivative_path(self, key: str) -> Path:
        return self.directory / f"ground_{key[:16]}_d2.nlss"

    def store(self, ground: GroundState) -> GroundStateEntry:
        if ground.dmu_phi is None or ground.d2mu_phi is None:
            raise ValueError("only ground states with ∂μφ and ∂²μφ can be cached")
        key = cache_key(ground.mu, ground.grid, ground.params)
        write_checkpoint(self.second_derivative_path(key), ground.grid, 0.0, ground.d2mu_phi)
        path = write_checkpoint(self.path_for(key), ground.grid, 0.0, spinor(ground.phi, ground.dmu_phi))
        entry = GroundStateEntry(key=key, mu=ground.mu, dim=ground.grid.dim,
                                 points_per_axis=ground.grid.points_per_axis,
                                 box_length=float(ground.grid.box_length[0]),
                                 params_json=ground.params.model_dump_json(), residual=ground.residual,
                                 mass=ground.mass, path=str(path))
        with get_session(self.engine) as session:
            entry = create_entry(session, entry)
        log.info("cached ground state mu=%.6g at %s", ground.mu, path)
        return entry

    def load(self, mu: float, grid: Grid, params: ModelParams) -> Optional[GroundState]:
        """Cached state, or None on a miss or when the stored residual is not reproduced."""
        key = cache_key(mu, grid, params)
        with get_session(self.engine) as session:
            entry = get_entry(session, key)
            if entry is None:
                return None
            path, stored_residual, mass = entry.path, entry.residual, entry.mass
        try:
            ckpt = read_checkpoint(path)
            second = read_checkpoint(self.second_derivative_path(key))
        except (OSError, CheckpointError) as exc:
            log.warning("cache entry for mu=%.6g is unreadable (%s); re-solving", mu, exc)
            return None
        if ckpt.grid != grid or ckpt.field.shape != (2, *grid.shape) or second.field.shape != grid.shape:
            log.warning("cache entry for mu=%.6g has a mismatched grid; re-solving", mu)
            return None
        phi, dphi = ckpt.field[0], ckpt.field[1]
        residual = equation_residual(phi, mu, grid, params)
        if abs(residual - stored_residual) > RESIDUAL_RECHECK_RTOL * max(abs(stored_residual), 1e-300):
            log.warning("cached residual %.6e for mu=%.6g re-evaluates to %.6e; re-solving",
                        stored_residual, mu, residual)
            return None
        log.debug("cache hit for mu=%.6g (%s)", mu, path)
        return GroundState(mu=mu, phi=phi, dmu_phi=dphi, d2mu_phi=second.field, residual=residual, mass=mass,
                           grid=grid, params=params, radial_defect=radial_defect(phi, grid))

    def get_or_solve(self, mu: float, grid: Grid, params: ModelParams,
                     opts: GroundStateOptions | None = None) -> GroundState:
        cached = self.load(mu, grid, params)
        if cached is not None:
            return cached
        ground = solve_ground_state(mu, grid, params, opts)
        self.store(ground)
        return ground


def ground_state_for(mu: float, grid: Grid, params: ModelParams, opts: GroundStateOptions | None = None,
                     cache: Optional[GroundStateCache] = None) -> GroundState:
    if cache is None:
        return solve_ground_state(mu, grid, params, opts)
    return cache.get_or_solve(mu, grid, params, opts)


__all__ = ["GroundStateCache", "cache_key", "canonical_json", "ground_state_for"]
