"""Scenario drivers: finite-time interaction scaling, post-interaction scattering
and ε-uniformity of the linear Z-system.

Each driver takes a validated ``RunConfig`` and returns a report model from
``schemas.reports``; ε-members of a sweep are independent and can run in a
process pool.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.fft
from scipy import stats
from scipy.integrate import trapezoid

from .. import __version__
from ..core.errors import ConfigurationError, NewtonDivergence, SeparationViolated, SingularJacobian
from ..core.grid import Grid, make_grid, spinor
from ..core.logging import logger
from ..schemas.reports import (FiniteTimeMember, PostInteractionReport, RunMetadata, ScalingReport,
                               ScatteringSample, SigmaOut, SlopeFit, UniformityMember, UniformityReport)
from ..schemas.run_config import RunConfig
from ..storage.cache import GroundStateCache, ground_state_for
from ..storage.checkpoint import read_checkpoint, write_checkpoint
from ..storage.emitters import write_sigma_csv
from .evolver import (BoundaryMonitor, CheckpointObserver, DecompositionObserver, EvolverState, NLSEvolver,
                      NormObserver, Observer)
from .ground_state import GroundState
from .linearized import MovingFrame, build_root_space, moving_soliton, project_pb_time, v1_eps, v2_moving
from .modulation import integrate_modulation
from .soliton import (SolitonParams, decompose, group_action, initial_sigma, make_soliton,
                      project_off_manifold)
from .zsystem import StrichartzAccumulator, ZSystem, free_l6_decay, propagate_z

log = logger.getChild("experiments")


# --- shared helpers -------------------------------------------------------------------

def grid_from_config(cfg: RunConfig) -> Grid:
    return make_grid(cfg.grid.dim, cfg.grid.points_per_axis, cfg.grid.box_length)


def run_metadata(cfg: RunConfig, grid: Grid, seed: int, threads: int = 1) -> RunMetadata:
    return RunMetadata(config_hash=cfg.config_hash(), grid=grid.describe(), seed=seed, threads=threads,
                       package_version=__version__)


def sigma_out(sigma: SolitonParams) -> SigmaOut:
    return SigmaOut(**sigma.to_dict())


def open_cache(cfg: RunConfig) -> Optional[GroundStateCache]:
    return GroundStateCache() if cfg.output.use_cache else None


def prepare_ground(cfg: RunConfig, grid: Optional[Grid] = None,
                   cache: Optional[GroundStateCache] = None) -> GroundState:
    """φ at the configured μ₀; it does not depend on ε, so one solve serves the whole sweep."""
    grid = grid or grid_from_config(cfg)
    return ground_state_for(cfg.sigma0.mu, grid, cfg.model, cfg.ground, cache)


def free_flow(f: np.ndarray, grid: Grid, t: float) -> np.ndarray:
    """e^{itΔ/2} f."""
    return grid.apply_multiplier(f, np.exp(-0.5j * t * grid.k2))


def smooth_random_field(grid: Grid, rng: np.random.Generator, center: Sequence[float], width: float = 3.0,
                        cutoff: float = 2.0) -> np.ndarray:
    """Band-limited complex noise under a Gaussian envelope, unit L² norm."""
    noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    noise = grid.apply_multiplier(noise, np.exp(-grid.k2 / cutoff**2))
    envelope = np.exp(-grid.radius(center) ** 2 / (2.0 * width**2))
    f = envelope * noise
    return f / grid.l2_norm(f)


def guess_sigma(u: np.ndarray, grid: Grid, mu: float) -> SolitonParams:
    """Starting guess for decomposing an arbitrary field: peak position, mean velocity, local phase."""
    modulus = np.abs(u)
    idx = np.unravel_index(np.argmax(modulus), modulus.shape)
    a = grid.points[idx]
    mass = grid.l2_norm(u) ** 2
    v = np.array([grid.real_inner(-1j * g, u) for g in grid.gradient(u)]) / mass
    gamma = float(np.angle(u[idx])) - float(np.dot(v, a))
    return SolitonParams(a=a, v=v, gamma=gamma, mu=mu)


def _trapezoid_l2(times: np.ndarray, values: np.ndarray) -> float:
    if len(times) < 2:
        return 0.0
    return float(np.sqrt(trapezoid(np.asarray(values) ** 2, times)))


def _map_members(fn: Callable, args: list[tuple], jobs: int) -> list:
    if jobs <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=min(jobs, len(args))) as pool:
        return list(pool.map(fn, *zip(*args)))


# --- finite-time interaction --------------------------------------------------------

def finite_time_member(cfg: RunConfig, eps: float, ground: GroundState, out_dir: Optional[Path] = None,
                       threads: int = 1) -> FiniteTimeMember:
    """One ε of the scaling study: evolve the boosted soliton to T = C·ε^{-δ} and track σ(t)."""
    with scipy.fft.set_workers(threads):
        return _finite_time_member(cfg, eps, ground, out_dir)


def _finite_time_member(cfg: RunConfig, eps: float, ground: GroundState, out_dir: Optional[Path]) -> FiniteTimeMember:
    sc = cfg.scenario
    grid = ground.grid
    params = cfg.model.with_eps(eps)
    ground = replace(ground, params=params)
    sigma0 = initial_sigma(cfg.sigma0, eps, grid.dim)
    horizon = cfg.horizon_for(eps)
    log.info("finite-time run eps=%g: T=%.6g, a0=%s, v0=%s", eps, horizon, sigma0.a, sigma0.v)

    evolver = NLSEvolver(grid, params, sc.dt, with_potential=sc.with_potential)
    decomp = DecompositionObserver(ground, sigma0, sc.decompose_stride)
    norms = NormObserver(sc.decompose_stride)
    boundary = BoundaryMonitor(grid, sc.decompose_stride)
    observers: list[Observer] = [decomp, norms, boundary]
    if sc.checkpoint_stride and out_dir is not None:
        observers.append(CheckpointObserver(out_dir / f"checkpoints_eps{eps:g}", sc.checkpoint_stride))

    status, error = "ok", ""
    state = evolver.initial_state(make_soliton(sigma0, ground))
    try:
        evolver.run(state, horizon, observers)
    except (NewtonDivergence, SingularJacobian) as exc:
        status, error = "tube_exit", f"{type(exc).__name__}: {exc}"
        log.warning("eps=%g left the decomposition tube at t=%.6g: %s", eps, state.t, exc)

    records = decomp.records
    times = decomp.times()
    path = integrate_modulation(sigma0, max(float(times[-1]), 0.0), sc.ode_dt or sc.dt, params,
                                with_potential=sc.with_potential)
    ode = [path.at(t) for t in times]
    pos_dev = max(eps * float(np.max(np.abs(rec.sigma.a - s.a))) for rec, s in zip(records, ode))
    vel_dev = max(float(np.max(np.abs(rec.sigma.v - s.v))) / eps for rec, s in zip(records, ode))

    rows = norms.rows
    mass0, energy0 = rows[0]["mass"], rows[0]["energy"]
    mass_drift = max(abs(r["mass"] - mass0) for r in rows) / mass0
    energy_drift = max(abs(r["energy"] - energy0) for r in rows) / max(abs(energy0), 1e-300)

    csv_path = None
    if out_dir is not None and cfg.output.csv:
        csv_path = str(write_sigma_csv(out_dir / f"finite_time_eps{eps:g}.csv", records, grid.dim))

    last = records[-1]
    return FiniteTimeMember(
        eps=eps, horizon=horizon, steps=state.step_count, r_h1_final=last.r_h1,
        max_position_deviation=pos_dev, max_velocity_deviation=vel_dev,
        orth_residual_max=max(rec.orth_residual for rec in records), lyapunov_gap_final=last.lyapunov_gap,
        mass_drift=mass_drift, energy_drift=energy_drift,
        r_linf_h1=max(rec.radiation_h1 for rec in records),
        r_l2_w16=_trapezoid_l2(times, [rec.radiation_w16 for rec in records]),
        sigma_final=sigma_out(last.sigma), first_wrap_time=boundary.first_wrap_time,
        status=status, error=error, csv_path=csv_path)


def fit_loglog(eps: Sequence[float], values: Sequence[float], expected: Optional[float] = None) -> Optional[SlopeFit]:
    """Least-squares slope of log(value) against log(ε) with its 95% half-width."""
    x = np.log(np.asarray(eps, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    keep = np.isfinite(y)
    if keep.sum() < 2:
        return None
    fit = stats.linregress(x[keep], y[keep])
    n = int(keep.sum())
    half = float(stats.t.ppf(0.975, n - 2) * fit.stderr) if n > 2 else float("nan")
    return SlopeFit(slope=float(fit.slope), intercept=float(fit.intercept), half_width=half,
                    expected=expected, points=n)


def run_finite_time(cfg: RunConfig, *, out_dir: Optional[Path] = None, seed: int = 0, threads: int = 1,
                    jobs: int = 1, ground: Optional[GroundState] = None) -> ScalingReport:
    eps_values = cfg.eps_values()
    cfg.check_resolvable(eps_values)
    grid = grid_from_config(cfg)
    ground = ground or prepare_ground(cfg, grid, open_cache(cfg))
    members = _map_members(finite_time_member, [(cfg, eps, ground, out_dir, threads) for eps in eps_values], jobs)
    ok = [m for m in members if m.status == "ok" and m.r_h1_final > 0]
    expected = 4.0 - cfg.scenario.delta if cfg.scenario.horizon == "scaled" else None
    fit = fit_loglog([m.eps for m in ok], [m.r_h1_final for m in ok], expected)
    ordered = sorted(ok, key=lambda m: -m.eps)
    decreasing = None
    if len(ordered) >= 2:
        devs = [m.max_position_deviation for m in ordered]
        decreasing = all(b < a for a, b in zip(devs, devs[1:]))
    if fit is not None:
        log.info("log-log slope of |r(T)|_H1 vs eps: %.3f ± %.3f (expected %s)", fit.slope, fit.half_width, expected)
    return ScalingReport(meta=run_metadata(cfg, grid, seed, threads), delta=cfg.scenario.delta, members=members,
                         fit=fit, deviation_decreasing=decreasing)


# --- post-interaction -------------------------------------------------------------------

def modulation_defect_rates(times: np.ndarray, sigmas: Sequence[SolitonParams]) -> np.ndarray:
    """|(ȧ - υ, υ̇, γ̇ - μ + |υ|²/2, μ̇)| on each interval, by finite differences of the path."""
    out = []
    for (t0, s0), (t1, s1) in zip(zip(times, sigmas), zip(times[1:], sigmas[1:])):
        h = t1 - t0
        v_mid = 0.5 * (s0.v + s1.v)
        mu_mid = 0.5 * (s0.mu + s1.mu)
        dgamma = float(np.angle(np.exp(1j * (s1.gamma - s0.gamma))))
        parts = np.concatenate([(s1.a - s0.a) / h - v_mid, (s1.v - s0.v) / h,
                                [dgamma / h - mu_mid + 0.5 * float(np.dot(v_mid, v_mid)), (s1.mu - s0.mu) / h]])
        out.append(float(np.linalg.norm(parts)))
    return np.array(out)


def separation_margin(sigma: SolitonParams, eps: float, times: np.ndarray, c1: float, c0: float) -> np.ndarray:
    """|a + υt| - (c₁/ε + c₀εt) along the free trajectory."""
    pos = sigma.a[None, :] + times[:, None] * sigma.v[None, :]
    return np.linalg.norm(pos, axis=1) - (c1 / eps + c0 * eps * times)


class RadiationSampler(Observer):
    """Stores R(T) = u(T) - w(σ(T)) at the requested times, reusing the decomposition warm start."""

    name = "radiation"

    def __init__(self, decomposition: DecompositionObserver, times: Sequence[float], dt: float):
        super().__init__(1)
        self.decomposition = decomposition
        self.pending = sorted(float(t) for t in times)
        self.dt = dt
        self.samples: list[tuple[float, SolitonParams, np.ndarray]] = []

    def start(self, evolver: NLSEvolver, state: EvolverState) -> None:
        self.observe(evolver, state)

    def observe(self, evolver: NLSEvolver, state: EvolverState) -> None:
        if not self.pending or state.t < self.pending[0] - 0.5 * self.dt:
            return
        while self.pending and self.pending[0] <= state.t + 0.5 * self.dt:
            self.pending.pop(0)
        self.take(state)

    def take(self, state: EvolverState) -> None:
        ground = self.decomposition.ground
        dec = decompose(state.u, self.decomposition.sigma, ground, self.decomposition.opts)
        self.samples.append((state.t, dec.sigma, state.u - make_soliton(dec.sigma, ground)))


def synthetic_radiation(sigma: SolitonParams, ground: GroundState, h1_size: float, seed: int) -> np.ndarray:
    """Smooth fluctuation near the soliton, skew-orthogonal to the tangent space, of the requested H¹ size."""
    grid = ground.grid
    if h1_size == 0:
        return np.zeros(grid.shape, dtype=complex)
    rng = np.random.default_rng(seed)
    zeta = project_off_manifold(smooth_random_field(grid, rng, np.zeros(grid.dim)), ground, sigma.mu)
    r = group_action(zeta, sigma.a, sigma.v, sigma.gamma, grid)
    return h1_size * r / grid.h1_norm(r)


def run_post_interaction(cfg: RunConfig, *, eps: Optional[float] = None, out_dir: Optional[Path] = None,
                         seed: int = 0, threads: int = 1, resume: Optional[Path] = None,
                         ground: Optional[GroundState] = None) -> PostInteractionReport:
    sc = cfg.scenario
    eps = eps if eps is not None else cfg.eps_values()[0]
    cfg.check_resolvable([eps])
    grid = grid_from_config(cfg)
    params = cfg.model.with_eps(eps)
    ground = ground or prepare_ground(cfg, grid, open_cache(cfg))
    ground = replace(ground, params=params)
    horizon = cfg.horizon_for(eps)

    t0 = 0.0
    if resume is not None:
        ckpt = read_checkpoint(resume)
        if ckpt.grid != grid:
            raise ConfigurationError(f"checkpoint grid {ckpt.grid.shape} does not match the configured grid")
        t0 = ckpt.t
        u0 = ckpt.field
        sigma_start = decompose(u0, guess_sigma(u0, grid, cfg.sigma0.mu), ground).sigma
    else:
        sigma_start = initial_sigma(cfg.sigma0, eps, grid.dim)
        u0 = make_soliton(sigma_start, ground) + synthetic_radiation(sigma_start, ground, sc.radiation_h1, seed)

    check_times = np.linspace(0.0, horizon, 201)
    margin = separation_margin(sigma_start, eps, check_times, sc.separation_c1, sc.separation_c0)
    if margin.min() < 0:
        t_bad = float(check_times[int(np.argmin(margin))])
        raise SeparationViolated(f"|a + v t| >= c1/eps + c0 eps t fails at t = {t_bad:.6g} "
                                 f"(margin {margin.min():.4g}); the soliton must start outside the potential "
                                 "and move away from it")

    sample_times = list(sc.sample_times) or list(np.linspace(0.5 * horizon, horizon, 6))
    sample_times = [t0 + t for t in sample_times]
    evolver = NLSEvolver(grid, params, sc.dt, with_potential=sc.with_potential)
    decomp = DecompositionObserver(ground, sigma_start, sc.decompose_stride)
    sampler = RadiationSampler(decomp, sample_times, sc.dt)
    boundary = BoundaryMonitor(grid, sc.decompose_stride)
    log.info("post-interaction run eps=%g over [%.6g, %.6g]", eps, t0, t0 + horizon)
    with scipy.fft.set_workers(threads):
        state = evolver.initial_state(u0, t0)
        evolver.run(state, t0 + horizon, [decomp, sampler, boundary])
        if not sampler.samples or sampler.samples[-1][0] < state.t - 0.5 * sc.dt:
            sampler.take(state)

    times = decomp.times()
    sigmas = [rec.sigma for rec in decomp.records]
    rates = modulation_defect_rates(times, sigmas)
    l1 = np.concatenate([[0.0], np.cumsum(rates * np.diff(times))])
    half = float(np.interp(t0 + 0.5 * horizon, times, l1))
    margins = [float(np.linalg.norm(s.a)) - (sc.separation_c1 / eps + sc.separation_c0 * eps * (t - t0))
               for t, s in zip(times, sigmas)]

    t_final, sigma_plus, rad_final = sampler.samples[-1]
    u_plus = free_flow(rad_final, grid, -t_final)
    samples = []
    for t, sigma, rad in sampler.samples:
        metric = grid.h1_norm(rad - free_flow(u_plus, grid, t))
        upto = times <= t + 0.5 * sc.dt
        samples.append(ScatteringSample(
            t=t, metric=metric, sigma_dot_l1=float(np.interp(t, times, l1)),
            r_linf_h1=max(rec.radiation_h1 for rec, keep in zip(decomp.records, upto) if keep),
            r_l2_w16=_trapezoid_l2(times[upto], [rec.radiation_w16 for rec, keep in zip(decomp.records, upto) if keep])))
    # the last sample defines u₊, so its metric vanishes and is left out of the trend
    metrics = [s.metric for s in samples[:-1]]
    monotone = all(b <= 1.1 * a for a, b in zip(metrics, metrics[1:]))

    u_plus_path = None
    if out_dir is not None:
        u_plus_path = str(write_checkpoint(out_dir / f"u_plus_eps{eps:g}.nlss", grid, t_final, u_plus))
        if cfg.output.csv:
            write_sigma_csv(out_dir / f"post_interaction_eps{eps:g}.csv", decomp.records, grid.dim)
    wrap = boundary.first_wrap_time
    return PostInteractionReport(
        meta=run_metadata(cfg, grid, seed, threads), eps=eps, horizon=horizon, sigma_start=sigma_out(sigma_start),
        sigma_plus=sigma_out(sigma_plus), sigma_dot_l1=float(l1[-1]), sigma_dot_l1_half=half,
        plateau=bool(l1[-1] <= 2.0 * half) if half > 0 else bool(l1[-1] == 0.0),
        metric_monotone=monotone, samples=samples, min_separation_margin=min(margins),
        first_wrap_time=wrap, contaminated=wrap is not None and wrap < t0 + horizon, u_plus_path=u_plus_path)


# --- charge-transfer uniformity ---------------------------------------------------------

@dataclass
class ZProblem:
    system: ZSystem
    z0: np.ndarray
    projector: Optional[Callable]
    frame: MovingFrame


def initial_z(grid: Grid, amplitude: float, seed: int) -> np.ndarray:
    """(R, R̄) with R smooth noise around the origin; independent of ε."""
    if amplitude == 0:
        return np.zeros((2, *grid.shape), dtype=complex)
    r = amplitude * smooth_random_field(grid, np.random.default_rng(seed), np.zeros(grid.dim))
    return spinor(r, np.conj(r))


def forcing_source(grid: Grid, amplitude: float, seed: int) -> Optional[Callable[[float], np.ndarray]]:
    """F(t) = A cos(t) (f, -f̄); this sign pattern keeps the conjugate structure of Z."""
    if amplitude == 0:
        return None
    f = amplitude * smooth_random_field(grid, np.random.default_rng(seed + 1), np.zeros(grid.dim))
    pattern = spinor(f, -np.conj(f))
    return lambda t: np.cos(t) * pattern


def build_z_problem(cfg: RunConfig, eps: float, ground: GroundState, seed: int) -> ZProblem:
    sc = cfg.scenario
    grid = ground.grid
    params = cfg.model.with_eps(eps)
    sigma_t0 = initial_sigma(cfg.sigma0, eps, grid.dim)
    if sc.frame == "modulation":
        path = integrate_modulation(sigma_t0, sc.z_horizon, sc.ode_dt or sc.dt, params, with_potential=sc.with_v1)
        frame = MovingFrame.from_path(sigma_t0, path.times, path.v, path.mu)
    else:
        frame = MovingFrame.frozen(sigma_t0)
    moving = None
    projector = None
    if sc.with_v2:
        ground_eps = replace(ground, params=params)
        moving = lambda t: v2_moving(moving_soliton(frame, ground_eps, t), params)  # noqa: E731
        root0 = build_root_space(ground)
        projector = lambda t, z: project_pb_time(t, frame, root0, z)  # noqa: E731
    system = ZSystem(grid, sc.z_dt or sc.dt, static=v1_eps(grid, params) if sc.with_v1 else None,
                     moving=moving, forcing=forcing_source(grid, sc.forcing_amplitude, seed))
    return ZProblem(system=system, z0=initial_z(grid, sc.z_amplitude, seed), projector=projector, frame=frame)


def uniformity_member(cfg: RunConfig, eps: float, ground: GroundState, seed: int, threads: int = 1) -> UniformityMember:
    sc = cfg.scenario
    grid = ground.grid
    with scipy.fft.set_workers(threads):
        problem = build_z_problem(cfg, eps, ground, seed)
        acc = StrichartzAccumulator(grid)
        run = propagate_z(problem.z0, problem.system, sc.z_horizon, accumulator=acc,
                          projector=problem.projector, sample_every=sc.z_sample_every)
    norms = run.norms
    z0_l2 = grid.l2_norm(problem.z0)
    denominator = z0_l2 + norms.forcing_l2t_l65x + norms.pb_l2t_l6x
    ratio = norms.l2t_l6x / denominator if denominator > 0 else float("nan")
    free = None
    if z0_l2 > 0:
        # |Z|² = 2|R|² for Z = (R, R̄)
        free = _trapezoid_l2(run.times, np.sqrt(2.0) * free_l6_decay(problem.z0[0], grid, run.times))
    log.info("Z-system eps=%g: rho=%.6g, symmetry defect %.2e", eps, ratio, run.symmetry_defect)
    return UniformityMember(eps=eps, ratio=ratio, l2t_l6x=norms.l2t_l6x, linf_l2=norms.linf_l2, z0_l2=z0_l2,
                            forcing_dual=norms.forcing_l2t_l65x, pb_l2t_l6x=norms.pb_l2t_l6x,
                            local_decay_v1=norms.local_decay_v1, local_decay_v2=norms.local_decay_v2,
                            symmetry_defect=run.symmetry_defect, free_l6_l2t=free)


def run_charge_transfer_uniformity(cfg: RunConfig, *, seed: int = 0, threads: int = 1, jobs: int = 1,
                                   ground: Optional[GroundState] = None) -> UniformityReport:
    eps_values = cfg.eps_values()
    grid = grid_from_config(cfg)
    ground = ground or prepare_ground(cfg, grid, open_cache(cfg))
    members = _map_members(uniformity_member, [(cfg, eps, ground, seed, threads) for eps in eps_values], jobs)
    ratios = np.array([m.ratio for m in members])
    spread = float(ratios.max() / ratios.min()) if np.all(ratios > 0) else float("nan")
    log.info("rho spread across eps: %.4g", spread)
    return UniformityReport(meta=run_metadata(cfg, grid, seed, threads), horizon=cfg.scenario.z_horizon,
                            members=members, spread=spread)


# --- sweeps ----------------------------------------------------------------------------

def _post_member(cfg: RunConfig, eps: float, ground: GroundState, out_dir: Optional[Path], seed: int,
                 threads: int) -> PostInteractionReport:
    return run_post_interaction(cfg, eps=eps, out_dir=out_dir, seed=seed, threads=threads, ground=ground)


SCENARIOS = ("interact", "post", "zprop")


def run_sweep(cfg: RunConfig, scenario: str, *, out_dir: Optional[Path] = None, seed: int = 0,
              threads: int = 1) -> list[dict]:
    """Run ``scenario`` for every ε of the sweep on ``sweep.jobs`` worker processes; reports keep ε order."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; choose one of {', '.join(SCENARIOS)}")
    jobs = cfg.sweep.jobs
    eps_values = cfg.eps_values()
    cfg.check_resolvable(eps_values)
    grid = grid_from_config(cfg)
    ground = prepare_ground(cfg, grid, open_cache(cfg))
    log.info("sweep %s over eps=%s with %d job(s)", scenario, eps_values, jobs)
    if scenario == "interact":
        report = run_finite_time(cfg, out_dir=out_dir, seed=seed, threads=threads, jobs=jobs, ground=ground)
        return [report.model_dump()]
    if scenario == "zprop":
        report = run_charge_transfer_uniformity(cfg, seed=seed, threads=threads, jobs=jobs, ground=ground)
        return [report.model_dump()]
    reports = _map_members(_post_member, [(cfg, eps, ground, out_dir, seed, threads) for eps in eps_values], jobs)
    return [r.model_dump() for r in reports]


__all__ = [
    "run_finite_time", "run_post_interaction", "run_charge_transfer_uniformity", "run_sweep", "fit_loglog",
    "finite_time_member", "uniformity_member", "build_z_problem", "modulation_defect_rates",
    "separation_margin", "synthetic_radiation", "guess_sigma", "free_flow", "prepare_ground",
]
