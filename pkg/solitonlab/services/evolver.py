"""Strang split-step integration of i∂_t u = -½Δu + V_ε u - F(|u|²)u on the torus."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from ..core.errors import ConfigurationError, NonFinite
from ..core.grid import ComplexField, Grid
from ..core.logging import logger
from ..schemas.params import DecomposeOptions, ModelParams
from ..storage.checkpoint import write_checkpoint
from .ground_state import GroundState, lyapunov_gap
from .model import nonlinearity, nonlinearity_antiderivative, potential_field
from .soliton import SolitonParams, decompose, make_soliton, momentum

log = logger.getChild("evolver")

BLOWUP_FACTOR = 1e3


@dataclass
class EvolverState:
    t: float
    u: ComplexField
    dt: float
    step_count: int = 0
    mass0: float = float("nan")
    energy0: float = float("nan")
    linf0: float = float("nan")

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ConfigurationError(f"time step must be positive, got {self.dt}")


@dataclass(frozen=True, eq=False)
class Conserved:
    mass: float
    energy: float
    momentum: np.ndarray


class NLSEvolver:
    def __init__(self, grid: Grid, params: ModelParams, dt: float, *, with_potential: bool = True,
                 blowup_factor: float = BLOWUP_FACTOR):
        if not dt > 0:
            raise ConfigurationError(f"time step must be positive, got {dt}")
        self.grid = grid
        self.params = params
        self.dt = dt
        self.with_potential = with_potential
        self.blowup_factor = blowup_factor
        self.potential = potential_field(grid, params, with_potential)
        self.kinetic = np.exp(-0.5j * dt * grid.k2)
        cfl = 0.5 * dt * grid.k2_max
        if cfl > np.pi:
            log.warning("dt·max|k|²/2 = %.3f exceeds π; the kinetic phase is aliased", cfl)

    # --- single steps ---------------------------------------------------------------

    def _phase_half(self, u: np.ndarray) -> np.ndarray:
        # |u| is invariant under this substep, so the frozen-modulus phase is exact
        rate = self.potential - nonlinearity(np.abs(u) ** 2, self.params)
        return np.exp(-0.5j * self.dt * rate) * u

    def initial_state(self, u0: np.ndarray, t0: float = 0.0) -> EvolverState:
        u0 = np.asarray(u0, dtype=complex)
        if u0.shape != self.grid.shape:
            raise ConfigurationError(f"initial field has shape {u0.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(u0)):
            raise NonFinite("initial field contains NaN or Inf")
        c = self.conserved(u0)
        return EvolverState(t=t0, u=u0.copy(), dt=self.dt, mass0=c.mass, energy0=c.energy,
                            linf0=self.grid.linf_norm(u0))

    def step_strang(self, state: EvolverState) -> EvolverState:
        u = self._phase_half(state.u)
        u = self.grid.ifft(self.kinetic * self.grid.fft(u))
        u = self._phase_half(u)
        state.u = u
        state.t += self.dt
        state.step_count += 1
        self._check(state)
        return state

    def _check(self, state: EvolverState) -> None:
        if not np.all(np.isfinite(state.u)):
            raise NonFinite(f"field became non-finite at t = {state.t:.6g}")
        if state.linf0 > 0 and self.grid.linf_norm(state.u) > self.blowup_factor * state.linf0:
            raise NonFinite(f"L∞ norm grew by more than {self.blowup_factor:g} at t = {state.t:.6g}; "
                            "check the model configuration")

    # --- diagnostics ------------------------------------------------------------------

    def conserved(self, u: np.ndarray) -> Conserved:
        """Mass ∫|u|², energy ¼∫|∇u|² + ½∫V_ε|u|² - ∫G(|u|²) and momentum ⟨u, -i∇u⟩."""
        grid = self.grid
        m = np.abs(u) ** 2
        energy = (0.25 * grid.gradient_l2_squared(u) + 0.5 * float(grid.integrate(self.potential * m))
                  - float(grid.integrate(nonlinearity_antiderivative(m, self.params))))
        return Conserved(mass=float(grid.integrate(m)), energy=energy, momentum=momentum(u, grid))

    # --- runs -------------------------------------------------------------------------

    def run(self, u0: np.ndarray | EvolverState, t_end: float,
            observers: Sequence["Observer"] = ()) -> "RunResult":
        state = u0 if isinstance(u0, EvolverState) else self.initial_state(u0)
        span = t_end - state.t
        if span < 0:
            raise ConfigurationError(f"t_end = {t_end} precedes the current time {state.t}")
        n_steps = int(round(span / self.dt))
        if abs(n_steps * self.dt - span) > 1e-9 * max(1.0, abs(t_end)):
            log.warning("t_end is not a multiple of dt; the run stops at t = %.6g", state.t + n_steps * self.dt)
        for obs in observers:
            obs.start(self, state)
        first = state.step_count
        for k in range(n_steps):
            self.step_strang(state)
            last = k == n_steps - 1
            for obs in observers:
                if (state.step_count - first) % obs.stride == 0 or last:
                    obs.observe(self, state)
        c = self.conserved(state.u)
        drift = abs(c.mass - state.mass0) / state.mass0 if state.mass0 > 0 else 0.0
        log.info("evolved %d steps to t = %.6g (mass drift %.2e)", n_steps, state.t, drift)
        return RunResult(state=state, observers=list(observers))


# --- observers ------------------------------------------------------------------------

class Observer:
    """Fires at start, every ``stride`` steps and at the final step."""

    name = "observer"

    def __init__(self, stride: int):
        if int(stride) < 1:
            raise ConfigurationError(f"observer stride must be >= 1, got {stride}")
        self.stride = int(stride)

    def start(self, evolver: NLSEvolver, state: EvolverState) -> None:
        self.observe(evolver, state)

    def observe(self, evolver: NLSEvolver, state: EvolverState) -> None:
        raise NotImplementedError


@dataclass
class RunResult:
    state: EvolverState
    observers: list[Observer] = field(default_factory=list)

    def observer(self, name: str) -> Observer:
        for obs in self.observers:
            if obs.name == name:
                return obs
        raise KeyError(name)


class NormObserver(Observer):
    name = "norms"

    def __init__(self, stride: int):
        super().__init__(stride)
        self.rows: list[dict] = []

    def observe(self, evolver: NLSEvolver, state: EvolverState) -> None:
        c = evolver.conserved(state.u)
        self.rows.append({"t": state.t, "mass": c.mass, "energy": c.energy,
                          "momentum": c.momentum.tolist(), "linf": evolver.grid.linf_norm(state.u)})


@dataclass
class DecompositionRecord:
    t: float
    sigma: SolitonParams
    r_h1: float
    orth_residual: float
    lyapunov_gap: float
    radiation_h1: float
    radiation_w16: float


class DecompositionObserver(Observer):
    """Tracks σ(t) by skew-orthogonal decomposition, warm-started from the last σ."""

    name = "decomposition"

    def __init__(self, ground: GroundState, sigma0: SolitonParams, stride: int,
                 opts: Optional[DecomposeOptions] = None, keep_fields: bool = False):
        super().__init__(stride)
        self.ground = ground
        self.sigma = sigma0
        self.opts = opts or DecomposeOptions()
        self.keep_fields = keep_fields
        self.records: list[DecompositionRecord] = []
        self.fields: list[tuple[float, np.ndarray, np.ndarray]] = []

    def observe(self, evolver: NLSEvolver, state: EvolverState) -> None:
        grid = self.ground.grid
        dec = decompose(state.u, self.sigma, self.ground, self.opts)
        self.sigma = dec.sigma
        phi = self.ground.profile(dec.sigma.mu)
        radiation = state.u - make_soliton(dec.sigma, self.ground)
        self.records.append(DecompositionRecord(
            t=state.t, sigma=dec.sigma, r_h1=grid.h1_norm(dec.r), orth_residual=dec.orth_residual,
            lyapunov_gap=lyapunov_gap(dec.r, phi, dec.sigma.mu, grid, self.ground.params),
            radiation_h1=grid.h1_norm(radiation), radiation_w16=grid.w1q_norm(radiation, 6.0)))
        if self.keep_fields:
            self.fields.append((state.t, state.u.copy(), dec.r))

    def times(self) -> np.ndarray:
        return np.array([rec.t for rec in self.records])

    def sigma_array(self) -> np.ndarray:
        return np.array([rec.sigma.as_vector() for rec in self.records])


class CheckpointObserver(Observer):
    name = "checkpoints"

    def __init__(self, directory: str | Path, stride: int, prefix: str = "u"):
        super().__init__(stride)
        self.directory = Path(directory)
        self.prefix = prefix
        self.paths: list[Path] = []

    def observe(self, evolver: NLSEvolver, state: EvolverState) -> None:
        path = self.directory / f"{self.prefix}_{state.step_count:08d}.nlss"
        self.paths.append(write_checkpoint(path, evolver.grid, state.t, state.u))


class BoundaryMonitor(Observer):
    """Records the first time radiation reaches the box faces (the first wrap time).

    The field on the outer shell, outside a ball around the current peak, is
    compared with the initial peak; the threshold is raised to ten times the
    initial ratio when the soliton tail already exceeds it.
    """

    name = "boundary"

    def __init__(self, grid: Grid, stride: int, threshold: float = 1e-10, shell_fraction: float = 0.05,
                 exclusion_radius: float = 8.0):
        super().__init__(stride)
        self.grid = grid
        self.threshold = threshold
        self.shell = grid.boundary_mask(shell_fraction)
        self.exclusion_radius = exclusion_radius
        self.peak0: Optional[float] = None
        self.effective_threshold = threshold
        self.first_wrap_time: Optional[float] = None
        self.trace: list[tuple[float, float]] = []

    def _ratio(self, u: np.ndarray) -> float:
        modulus = np.abs(u)
        centre = self.grid.points[np.unravel_index(np.argmax(modulus), modulus.shape)]
        mask = self.shell & (self.grid.radius(centre) > self.exclusion_radius)
        if not np.any(mask):
            return 0.0
        return float(modulus[mask].max() / self.peak0)

    def start(self, evolver: NLSEvolver, state: EvolverState) -> None:
        self.peak0 = float(np.abs(state.u).max()) or 1.0
        ratio = self._ratio(state.u)
        self.effective_threshold = max(self.threshold, 10.0 * ratio)
        self.trace.append((state.t, ratio))

    def observe(self, evolver: NLSEvolver, state: EvolverState) -> None:
        ratio = self._ratio(state.u)
        self.trace.append((state.t, ratio))
        if self.first_wrap_time is None and ratio > self.effective_threshold:
            self.first_wrap_time = state.t
            log.warning("radiation reached the box boundary at t = %.6g (ratio %.2e)", state.t, ratio)


def evolve(u0: np.ndarray, grid: Grid, params: ModelParams, dt: float, t_end: float,
           observers: Iterable[Observer] = (), with_potential: bool = True) -> RunResult:
    return NLSEvolver(grid, params, dt, with_potential=with_potential).run(u0, t_end, list(observers))
