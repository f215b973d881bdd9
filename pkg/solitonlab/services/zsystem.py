"""Propagator of the matrix charge-transfer system i∂_t Z = (𝓗₀ + 𝓥₁ε + 𝓥₂(t))Z + F.

Strang splitting with the potential half-steps taken at the step midpoint:

    Z ← e^{-i(dt/2)𝓥(t+dt/2)} Z;  Z ← K(dt/2) Z;  Z ← Z - i dt F(t+dt/2);
    Z ← K(dt/2) Z;  Z ← e^{-i(dt/2)𝓥(t+dt/2)} Z,

where K(s) = diag(e^{-i|k|²s/2}, e^{+i|k|²s/2}). The pointwise 2×2 exponentials
are evaluated in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..core.errors import ConfigurationError, NonFinite
from ..core.grid import Grid, SpinorField
from ..core.logging import logger
from .ground_state import GroundState
from .linearized import MatrixPotential, build_root_space, project_pc, v2_static

log = logger.getChild("zsystem")

PotentialSource = Union[MatrixPotential, Callable[[float], MatrixPotential], None]
ForcingSource = Optional[Callable[[float], SpinorField]]

SERIES_THRESHOLD = 1e-4
ADMISSIBLE_TOL = 1e-12


def expm_2x2(pot: MatrixPotential, scale: complex) -> MatrixPotential:
    """Pointwise exp(scale·V).

    exp(G) = e^{tr/2}[cosh δ · I + (sinh δ / δ)(G - tr/2 · I)], δ² = (g11 - g22)²/4 + g12·g21;
    a Taylor series replaces cosh and sinh δ / δ when δ is small.
    """
    g11, g12, g21, g22 = (scale * pot.v11, scale * pot.v12, scale * pot.v21, scale * pot.v22)
    half_tr = 0.5 * (g11 + g22)
    delta = np.sqrt(0.25 * (g11 - g22) ** 2 + g12 * g21 + 0j)
    small = np.abs(delta) < SERIES_THRESHOLD
    d2 = delta**2
    cosh = np.where(small, 1 + d2 / 2 + d2**2 / 24, np.cosh(delta))
    safe = np.where(small, 1.0, delta)
    sinhc = np.where(small, 1 + d2 / 6 + d2**2 / 120, np.sinh(safe) / safe)
    pref = np.exp(half_tr)
    return MatrixPotential(pref * (cosh + sinhc * (g11 - half_tr)), pref * sinhc * g12,
                           pref * sinhc * g21, pref * (cosh + sinhc * (g22 - half_tr)))


def check_admissible(p: float, q: float) -> None:
    """Three-dimensional Strichartz admissibility 2/p = 3/2 - 3/q, 2 ≤ p ≤ ∞."""
    inv_p = 0.0 if np.isinf(p) else 2.0 / p
    if p < 2 or q < 2 or abs(inv_p - (1.5 - 3.0 / q)) > ADMISSIBLE_TOL:
        raise ConfigurationError(f"inadmissible pair (p, q) = ({p}, {q}): need 2/p = 3/2 - 3/q")


def free_l6_decay(u0: np.ndarray, grid: Grid, times: Sequence[float]) -> np.ndarray:
    """‖e^{itΔ/2}u₀‖_{L⁶} at each time, by the exact Fourier multiplier."""
    u_hat = grid.fft(u0)
    return np.array([grid.lq_norm(grid.ifft(np.exp(-0.5j * t * grid.k2) * u_hat), 6.0) for t in times])


# --- norm accumulation ------------------------------------------------------------------

@dataclass
class StrichartzNorms:
    horizon: float
    l2t_l6x: float
    linf_l2: float
    local_decay_v1: float
    local_decay_v2: float
    pb_l2t_l6x: float
    forcing_l2t_l65x: float
    pairs: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"T": self.horizon, "l2t_l6x": self.l2t_l6x, "linf_l2": self.linf_l2,
                "local_decay_v1": self.local_decay_v1, "local_decay_v2": self.local_decay_v2,
                "pb_l2t_l6x": self.pb_l2t_l6x, "forcing_l2t_l65x": self.forcing_l2t_l65x,
                "pairs": dict(self.pairs)}


class _Trapezoid:
    def __init__(self, power: float):
        self.power = power
        self.total = 0.0
        self.last: Optional[tuple[float, float]] = None

    def add(self, t: float, value: float) -> None:
        v = value**self.power
        if self.last is not None:
            t0, v0 = self.last
            self.total += 0.5 * (t - t0) * (v0 + v)
        self.last = (t, v)

    def value(self) -> float:
        return self.total ** (1.0 / self.power)


class StrichartzAccumulator:
    """Time-composite trapezoid of spatial norms along a Z path.

    Local-decay entries are unsquared: (∫∫ |W| |Z|²)^{1/2}, with W = V_ε for
    𝓥₁ε and the pointwise Frobenius norm for 𝓥₂.
    """

    def __init__(self, grid: Grid, pairs: Sequence[tuple[float, float]] = ((2.0, 6.0), (np.inf, 2.0))):
        for p, q in pairs:
            check_admissible(p, q)
        self.grid = grid
        self.pairs = [(float(p), float(q)) for p, q in pairs]
        self._pair_acc = {pq: (_Trapezoid(pq[0]) if np.isfinite(pq[0]) else None) for pq in self.pairs}
        self._pair_max = {pq: 0.0 for pq in self.pairs}
        self._l6 = _Trapezoid(2.0)
        self._pb = _Trapezoid(2.0)
        self._forcing = _Trapezoid(2.0)
        self._v1 = _Trapezoid(1.0)
        self._v2 = _Trapezoid(1.0)
        self._linf_l2 = 0.0
        self._t_first: Optional[float] = None
        self._t_last = 0.0

    def add(self, t: float, z: SpinorField, *, v1_weight: Optional[np.ndarray] = None,
            v2_weight: Optional[np.ndarray] = None, pb: Optional[SpinorField] = None,
            forcing: Optional[SpinorField] = None) -> None:
        grid = self.grid
        if self._t_first is None:
            self._t_first = t
        self._t_last = t
        density = np.sum(np.abs(z) ** 2, axis=0)
        self._l6.add(t, grid.lq_norm(z, 6.0))
        self._linf_l2 = max(self._linf_l2, grid.l2_norm(z))
        for pq in self.pairs:
            value = grid.lq_norm(z, pq[1])
            acc = self._pair_acc[pq]
            if acc is None:
                self._pair_max[pq] = max(self._pair_max[pq], value)
            else:
                acc.add(t, value)
        self._v1.add(t, float(grid.integrate(v1_weight * density)) if v1_weight is not None else 0.0)
        self._v2.add(t, float(grid.integrate(v2_weight * density)) if v2_weight is not None else 0.0)
        self._pb.add(t, grid.lq_norm(pb, 6.0) if pb is not None else 0.0)
        self._forcing.add(t, grid.lq_norm(forcing, 6.0 / 5.0) if forcing is not None else 0.0)

    def result(self) -> StrichartzNorms:
        pairs = {}
        for pq in self.pairs:
            acc = self._pair_acc[pq]
            label = f"L{'inf' if np.isinf(pq[0]) else f'{pq[0]:g}'}t_L{pq[1]:g}x"
            pairs[label] = self._pair_max[pq] if acc is None else acc.value()
        horizon = self._t_last - (self._t_first or 0.0)
        return StrichartzNorms(horizon=horizon, l2t_l6x=self._l6.value(), linf_l2=self._linf_l2,
                               local_decay_v1=float(np.sqrt(self._v1.total)),
                               local_decay_v2=float(np.sqrt(self._v2.total)),
                               pb_l2t_l6x=self._pb.value(), forcing_l2t_l65x=self._forcing.value(), pairs=pairs)


# --- propagation ----------------------------------------------------------------------

@dataclass
class ZRun:
    times: np.ndarray
    z: SpinorField
    norms: StrichartzNorms
    l2_trace: np.ndarray
    symmetry_defect: float
    snapshots: list[tuple[float, SpinorField]] = field(default_factory=list)


class ZSystem:
    def __init__(self, grid: Grid, dt: float, *, static: Optional[MatrixPotential] = None,
                 moving: PotentialSource = None, forcing: ForcingSource = None):
        if not dt > 0:
            raise ConfigurationError(f"time step must be positive, got {dt}")
        self.grid = grid
        self.dt = dt
        self.static = static
        self.moving = moving
        self.forcing = forcing
        quarter = 0.25 * dt * grid.k2
        self.kinetic_half = np.stack([np.exp(-1j * quarter), np.exp(1j * quarter)])
        self._cached_exp: Optional[MatrixPotential] = None

    def moving_at(self, t: float) -> Optional[MatrixPotential]:
        if self.moving is None or isinstance(self.moving, MatrixPotential):
            return self.moving
        return self.moving(t)

    def potential_at(self, t: float) -> Optional[MatrixPotential]:
        parts = [p for p in (self.static, self.moving_at(t)) if p is not None]
        if not parts:
            return None
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        return total

    def _half_exp(self, t_mid: float) -> Optional[MatrixPotential]:
        time_dependent = callable(self.moving)
        if not time_dependent and self._cached_exp is not None:
            return self._cached_exp
        pot = self.potential_at(t_mid)
        ex = expm_2x2(pot, -0.5j * self.dt) if pot is not None else None
        if not time_dependent:
            self._cached_exp = ex
        return ex

    def _kinetic(self, z: SpinorField) -> SpinorField:
        return self.grid.ifft(self.kinetic_half * self.grid.fft(z))

    def step(self, t: float, z: SpinorField) -> SpinorField:
        t_mid = t + 0.5 * self.dt
        ex = self._half_exp(t_mid)
        if ex is not None:
            z = ex.apply(z)
        z = self._kinetic(z)
        if self.forcing is not None:
            z = z - 1j * self.dt * self.forcing(t_mid)
        z = self._kinetic(z)
        if ex is not None:
            z = ex.apply(z)
        return z


def propagate_z(z0: SpinorField, system: ZSystem, t_end: float, *,
                accumulator: Optional[StrichartzAccumulator] = None,
                projector: Optional[Callable[[float, SpinorField], SpinorField]] = None,
                sample_every: int = 1, keep_every: int = 0, growth_limit: float = 1e8) -> ZRun:
    """Advance Z from t = 0 to t_end, feeding the accumulator every ``sample_every`` steps."""
    grid, dt = system.grid, system.dt
    if sample_every < 1:
        raise ConfigurationError("sample_every must be >= 1")
    z = np.asarray(z0, dtype=complex).copy()
    if z.shape != (2, *grid.shape):
        raise ConfigurationError(f"Z0 has shape {z.shape}, expected {(2, *grid.shape)}")
    n_steps = int(round(t_end / dt))
    acc = accumulator or StrichartzAccumulator(grid)
    v1_weight = np.abs(system.static.v11) if system.static is not None else None
    reference = grid.l2_norm(z)
    times, trace, snapshots = [], [], []
    defect = 0.0

    def sample(t: float, z_now: SpinorField) -> float:
        moving = system.moving_at(t)
        forcing = system.forcing(t) if system.forcing is not None else None
        acc.add(t, z_now, v1_weight=v1_weight,
                v2_weight=moving.frobenius() if moving is not None else None,
                pb=projector(t, z_now) if projector is not None else None, forcing=forcing)
        times.append(t)
        trace.append((grid.l2_norm(z_now[0]), grid.l2_norm(z_now[1])))
        norm = grid.l2_norm(z_now)
        return grid.l2_norm(z_now[1] - np.conj(z_now[0])) / norm if norm > 0 else 0.0

    defect = max(defect, sample(0.0, z))
    if keep_every:
        snapshots.append((0.0, z.copy()))
    forcing_mass = 0.0
    for n in range(1, n_steps + 1):
        t_prev = (n - 1) * dt
        z = system.step(t_prev, z)
        t = n * dt
        if system.forcing is not None:
            forcing_mass += dt * grid.l2_norm(system.forcing(t_prev + 0.5 * dt))
        if not np.all(np.isfinite(z)):
            raise NonFinite(f"Z became non-finite at t = {t:.6g}")
        scale = reference + forcing_mass
        if scale > 0 and grid.l2_norm(z) > growth_limit * scale:
            raise NonFinite(f"‖Z‖ exceeded {growth_limit:g} times the data size at t = {t:.6g}")
        if n % sample_every == 0 or n == n_steps:
            defect = max(defect, sample(t, z))
        if keep_every and (n % keep_every == 0 or n == n_steps):
            snapshots.append((t, z.copy()))
    log.debug("propagated Z over %d steps", n_steps)
    return ZRun(times=np.array(times), z=z, norms=acc.result(), l2_trace=np.array(trace),
                symmetry_defect=defect, snapshots=snapshots)


def linear_stability_trace(ground: GroundState, z0: SpinorField, t_end: float, dt: float,
                           sample_every: int = 10) -> np.ndarray:
    """‖e^{-it𝓗₂}P_cZ₀‖ / ‖P_cZ₀‖ on the sampled times."""
    root = build_root_space(ground)
    zc = project_pc(z0, root)
    system = ZSystem(ground.grid, dt, moving=v2_static(ground))
    run = propagate_z(zc, system, t_end, sample_every=sample_every)
    norms = np.sqrt(np.sum(run.l2_trace**2, axis=1))
    return norms / norms[0]
