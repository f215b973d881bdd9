"""Invariant suites behind the ``verify`` command.

Each check returns a ``VerifyCheck`` (name, measured value, tolerance, passed);
tolerances come from the ``verify`` section of the run file.
"""
from __future__ import annotations

import tempfile
from pathlib import Path
from typing import Callable

import numpy as np

from ..core.errors import SolitonLabError
from ..core.grid import Grid, make_grid, spinor
from ..core.logging import logger
from ..schemas.params import GroundStateOptions, ModelParams
from ..schemas.reports import VerifyCheck, VerifyReport
from ..schemas.run_config import RunConfig, VerifySection
from ..storage.checkpoint import read_checkpoint, write_checkpoint
from .evolver import NLSEvolver
from .ground_state import GroundState, solve_ground_state
from .linearized import apply_h2, build_root_space, project_pb, v1_eps, v2_static
from .model import nonlinearity
from .modulation import integrate_modulation
from .soliton import SolitonParams, decompose, make_soliton
from .zsystem import ZSystem, propagate_z

log = logger.getChild("verify")


def _check(name: str, value: float, tolerance: float, *, passed: bool | None = None, detail: str = "") -> VerifyCheck:
    value = float(value)
    ok = bool(np.isfinite(value) and value <= tolerance) if passed is None else passed
    return VerifyCheck(name=name, value=value, tolerance=tolerance, passed=ok, detail=detail)


def check_grid_roundtrip(grid: Grid, tol: float, rng: np.random.Generator) -> VerifyCheck:
    f = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    err = np.max(np.abs(grid.ifft(grid.fft(f)) - f)) / np.max(np.abs(f))
    return _check("grid_roundtrip", err, tol)


def check_ground_state(ground: GroundState, tol: float) -> list[VerifyCheck]:
    return [_check("ground_residual", ground.residual, tol),
            _check("ground_convexity", ground.convexity, 0.0, passed=ground.convexity > 0,
                   detail="<dmu phi, phi> must be positive")]


def check_mass_drift(ground: GroundState, vs: VerifySection) -> VerifyCheck:
    evolver = NLSEvolver(ground.grid, ground.params, vs.dt, with_potential=False)
    state = evolver.initial_state(ground.phi)
    for _ in range(vs.steps):
        evolver.step_strang(state)
    drift = abs(evolver.conserved(state.u).mass - state.mass0) / state.mass0
    return _check("mass_drift", drift, vs.mass_drift, detail=f"{vs.steps} Strang steps at dt={vs.dt:g}")


def check_plane_wave(grid: Grid, params: ModelParams, vs: VerifySection) -> VerifyCheck:
    """A constant-modulus plane wave is propagated exactly by the split step."""
    amplitude = 0.5
    k = 2.0 * np.pi * 3 / grid.box_length[0]
    x = grid.coords[0]
    u0 = amplitude * np.exp(1j * k * x) * np.ones(grid.shape)
    evolver = NLSEvolver(grid, params, vs.dt, with_potential=False)
    state = evolver.initial_state(u0)
    n = min(vs.steps, 200)
    for _ in range(n):
        evolver.step_strang(state)
    omega = 0.5 * k**2 - float(nonlinearity(amplitude**2, params))
    exact = amplitude * np.exp(1j * (k * x - omega * state.t)) * np.ones(grid.shape)
    err = np.max(np.abs(state.u - exact)) / amplitude
    return _check("plane_wave", err, vs.plane_wave)


def check_decomposition(ground: GroundState, vs: VerifySection, rng: np.random.Generator) -> VerifyCheck:
    grid = ground.grid
    d = grid.dim
    worst = 0.0
    for _ in range(vs.samples):
        direction = rng.standard_normal(d)
        v = 0.5 * rng.uniform() * direction / np.linalg.norm(direction)
        a = rng.uniform(-1.0, 1.0, d) * grid.box_length[0] / 8
        sigma = SolitonParams(a=a, v=v, gamma=rng.uniform(0, 2 * np.pi), mu=ground.mu)
        guess = sigma.replace(a=a + 0.05 * rng.standard_normal(d), v=v + 0.02 * rng.standard_normal(d),
                              gamma=sigma.gamma + 0.05, mu=ground.mu * 1.001)
        dec = decompose(make_soliton(sigma, ground), guess, ground)
        err = max(float(np.max(np.abs(dec.sigma.a - a))), float(np.max(np.abs(dec.sigma.v - v))),
                  dec.sigma.phase_distance(sigma), abs(dec.sigma.mu - sigma.mu), grid.h1_norm(dec.r))
        worst = max(worst, err)
    return _check("decomposition", worst, vs.decomposition, detail=f"{vs.samples} random σ with |v| <= 0.5")


def check_root_space(ground: GroundState, vs: VerifySection, rng: np.random.Generator) -> list[VerifyCheck]:
    grid = ground.grid
    root = build_root_space(ground)
    r = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    z = spinor(r, np.conj(r))
    pz = project_pb(z, root)
    idem = grid.l2_norm(project_pb(pz, root) - pz) / grid.l2_norm(pz)
    eta1, eta2 = root.etas[0], root.etas[1]
    h2 = apply_h2(root.sigma, eta2, ground, v2_static(ground))
    rel = grid.l2_norm(h2 - 1j * eta1) / grid.l2_norm(eta1)
    return [_check("root_idempotence", idem, vs.root_idempotence), _check("h2_eta2", rel, vs.h2_eta2)]


def check_z_symmetry(ground: GroundState, params: ModelParams, vs: VerifySection,
                     rng: np.random.Generator) -> VerifyCheck:
    grid = ground.grid
    r = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    r = 1e-3 * grid.apply_multiplier(r, np.exp(-grid.k2)) * np.exp(-grid.radius() ** 2 / 8)
    system = ZSystem(grid, 0.01, static=v1_eps(grid, params), moving=v2_static(ground))
    run = propagate_z(spinor(r, np.conj(r)), system, 1.0, sample_every=10)
    return _check("z_symmetry", run.symmetry_defect, vs.z_symmetry)


def check_checkpoint(grid: Grid, tol: float, rng: np.random.Generator) -> VerifyCheck:
    field = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    with tempfile.TemporaryDirectory() as tmp:
        path = write_checkpoint(Path(tmp) / "roundtrip.nlss", grid, 1.25, field)
        back = read_checkpoint(path)
    differing = int(np.count_nonzero(back.field.view(np.uint64) != field.view(np.uint64)))
    return _check("checkpoint", differing, tol, detail="number of differing 64-bit words")


def check_elasticity(params: ModelParams, dim: int, tol: float) -> list[VerifyCheck]:
    """Reflection off the bump under the classical modulation flow; energy and speed are restored."""
    eps = 0.1
    p = params.with_eps(eps)
    a0 = np.zeros(dim)
    v0 = np.zeros(dim)
    a0[0], v0[0] = -3.0 / eps, 0.8 * eps
    sigma = SolitonParams(a=a0, v=v0, gamma=0.0, mu=1.0)
    path = integrate_modulation(sigma, 7.5 / eps**2, 0.05, p)
    speed = abs(np.linalg.norm(path.v[-1]) - np.linalg.norm(v0)) / np.linalg.norm(v0)
    return [_check("elasticity_energy", path.energy_drift, tol), _check("elasticity_speed", speed, tol)]


def run_verify(cfg: RunConfig, *, seed: int = 0) -> list[VerifyCheck]:
    vs = cfg.verify
    rng = np.random.default_rng(seed)
    grid = make_grid(vs.dim, vs.points_per_axis, vs.box_length)
    params = cfg.model
    checks = [check_grid_roundtrip(grid, vs.grid_roundtrip, rng),
              check_checkpoint(grid, vs.checkpoint, rng)]
    checks += check_elasticity(params, vs.dim, vs.elasticity)

    def guarded(name: str, fn: Callable[[], list[VerifyCheck] | VerifyCheck]) -> list[VerifyCheck]:
        try:
            out = fn()
        except SolitonLabError as exc:
            log.error("check %s raised %s: %s", name, type(exc).__name__, exc)
            return [VerifyCheck(name=name, value=float("nan"), tolerance=0.0, passed=False,
                                detail=f"{type(exc).__name__}: {exc}")]
        return out if isinstance(out, list) else [out]

    opts = GroundStateOptions(**{**cfg.ground.model_dump(), "tol": min(cfg.ground.tol, vs.ground_residual)})
    try:
        ground = solve_ground_state(vs.mu, grid, params, opts)
    except SolitonLabError as exc:
        log.error("ground state for the verify grid failed: %s", exc)
        checks.append(VerifyCheck(name="ground_residual", value=float("nan"), tolerance=vs.ground_residual,
                                  passed=False, detail=f"{type(exc).__name__}: {exc}"))
        return checks
    checks += check_ground_state(ground, vs.ground_residual)
    checks += guarded("mass_drift", lambda: check_mass_drift(ground, vs))
    checks += guarded("plane_wave", lambda: check_plane_wave(grid, params, vs))
    checks += guarded("decomposition", lambda: check_decomposition(ground, vs, rng))
    checks += guarded("root_space", lambda: check_root_space(ground, vs, rng))
    checks += guarded("z_symmetry", lambda: check_z_symmetry(ground, params, vs, rng))
    for c in checks:
        log.info("%-20s %-5s value=%.3e tol=%.1e", c.name, "ok" if c.passed else "FAIL", c.value, c.tolerance)
    return checks


def verify_report(cfg: RunConfig, meta, *, seed: int = 0) -> VerifyReport:
    return VerifyReport(meta=meta, checks=run_verify(cfg, seed=seed))
