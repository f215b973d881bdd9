"""Ground states of -½Δφ - F(φ²)φ = -μφ and their μ-derivative.

A normalized gradient flow (imaginary time) at fixed L² mass, with a
semi-implicit spectral kinetic step, brings the profile near the branch; a
secant iteration on the mass steers its Rayleigh frequency to μ. A
Newton-Krylov solve of the stationary equation at fixed μ then polishes the
profile down to the requested residual.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.sparse.linalg import LinearOperator, gmres

from ..core.errors import CollapseToZero, ConvexityViolation, NonConvergence, SolitonLabError, UnderResolved
from ..core.grid import ComplexField, Grid
from ..core.logging import logger
from ..schemas.params import GroundStateOptions, ModelParams
from .model import nonlinearity, nonlinearity_antiderivative, nonlinearity_prime

log = logger.getChild("ground_state")

BOUNDARY_TOLERANCE = 1e-10
RADIAL_TOLERANCE = 1e-6
DTAU_MAX = 20.0
DTAU_MIN = 1e-8
# the tabulated antiderivative is not exact, so energy comparisons carry slack
ENERGY_RTOL = 1e-9
MASS_MATCH = 1e-3
# a seed this close to the equation at μ goes straight to Newton
WARM_START_RESIDUAL = 1e-2
GMRES_RESTART = 20
GMRES_MAXITER = 10
LINE_SEARCH_HALVINGS = 12


@dataclass
class GroundState:
    mu: float
    phi: ComplexField
    dmu_phi: Optional[ComplexField]
    residual: float
    mass: float
    grid: Grid
    params: ModelParams
    d2mu_phi: Optional[ComplexField] = None
    iterations: int = 0
    radial_defect: float = 0.0
    energy_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def convexity(self) -> float:
        """⟨∂μφ, φ⟩ = ½ dm/dμ."""
        if self.dmu_phi is None:
            raise SolitonLabError("∂μφ was not computed for this ground state")
        return self.grid.real_inner(self.dmu_phi, self.phi)

    def profile(self, mu: float) -> ComplexField:
        """φ_μ near the base frequency by Taylor expansion in μ."""
        delta = mu - self.mu
        if delta == 0 or self.dmu_phi is None:
            return self.phi
        out = self.phi + delta * self.dmu_phi
        if self.d2mu_phi is not None:
            out = out + 0.5 * delta**2 * self.d2mu_phi
        return out

    def dmu_profile(self, mu: float) -> ComplexField:
        if self.dmu_phi is None:
            raise SolitonLabError("∂μφ was not computed for this ground state")
        if self.d2mu_phi is None:
            return self.dmu_phi
        return self.dmu_phi + (mu - self.mu) * self.d2mu_phi

    def d2mu_profile(self) -> ComplexField:
        return self.d2mu_phi if self.d2mu_phi is not None else np.zeros_like(self.phi)

    def mass_derivative_at(self, mu: float) -> float:
        """m'(μ) = 2⟨∂μφ, φ⟩."""
        return 2.0 * self.grid.real_inner(self.dmu_profile(mu), self.profile(mu))


# --- functionals ------------------------------------------------------------------

def equation_residual(phi: np.ndarray, mu: float, grid: Grid, params: ModelParams) -> float:
    """‖-½Δφ - F(|φ|²)φ + μφ‖ / ‖μφ‖."""
    res = -0.5 * grid.laplacian(phi) - nonlinearity(np.abs(phi) ** 2, params) * phi + mu * phi
    return grid.l2_norm(res) / (abs(mu) * grid.l2_norm(phi))


def energy_functional(u: np.ndarray, mu: float, grid: Grid, params: ModelParams) -> float:
    """𝓔(u) = ¼∫|∇u|² + (μ/2)∫|u|² - ∫G(|u|²)."""
    m = np.abs(u) ** 2
    return (0.25 * grid.gradient_l2_squared(u) + 0.5 * mu * float(grid.integrate(m))
            - float(grid.integrate(nonlinearity_antiderivative(m, params))))


def lyapunov_gap(r: np.ndarray, phi: np.ndarray, mu: float, grid: Grid, params: ModelParams) -> float:
    """𝓔(φ + r) - 𝓔(φ); quadratic in r near the solitary manifold."""
    return energy_functional(phi + r, mu, grid, params) - energy_functional(phi, mu, grid, params)


def _fixed_mass_energy(phi: np.ndarray, phi_hat: np.ndarray, grid: Grid, params: ModelParams) -> float:
    grad2 = grid.cell_volume / grid.size * float(np.sum(grid.k2 * np.abs(phi_hat) ** 2))
    return 0.25 * grad2 - float(grid.integrate(nonlinearity_antiderivative(phi**2, params)))


# --- seeds, symmetry and resolution ---------------------------------------------------

def seed_profile(mu: float, grid: Grid, params: ModelParams) -> np.ndarray:
    """Gaussian seed: width μ^{-1/2}, peak where F(A²) = 2μ."""
    target = 2.0 * mu
    upper = 1.0
    while nonlinearity(upper, params) < target:
        upper *= 4.0
        if upper > 1e12:
            raise CollapseToZero(f"no seed amplitude reaches F = {target:g}")
    amp2 = brentq(lambda m: nonlinearity(m, params) - target, 0.0, upper, xtol=1e-14)
    width = 1.0 / np.sqrt(mu)
    return np.sqrt(amp2) * np.exp(-(grid.radius() ** 2) / (2 * width**2))


def symmetrize(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Even part of f in every coordinate about the box centre."""
    for axis in grid.axes:
        # x_j ↦ -x_j maps index j to N - j
        f = 0.5 * (f + np.roll(np.flip(f, axis=axis), 1, axis=axis))
    return f


def half_max_radius(phi: np.ndarray, grid: Grid) -> float:
    """Half-max radius read along the first axis through the origin."""
    n = grid.points_per_axis
    centre = (n // 2,) * grid.dim
    line = np.abs(phi[(slice(None),) + centre[1:]])
    x = grid.axis_coordinates[0]
    peak = line[n // 2]
    right = line[n // 2:]
    below = np.nonzero(right < 0.5 * peak)[0]
    if below.size == 0:
        return float(x[-1])
    j = below[0]
    # linear interpolation between the bracketing samples
    x0, x1 = x[n // 2 + j - 1], x[n // 2 + j]
    y0, y1 = right[j - 1], right[j]
    return float(x0 + (0.5 * peak - y0) * (x1 - x0) / (y1 - y0))


def check_resolution(phi: np.ndarray, grid: Grid, opts: GroundStateOptions) -> None:
    across = half_max_radius(phi, grid) / min(grid.spacing)
    if across < opts.min_points_across_radius:
        raise UnderResolved(
            f"only {across:.2f} grid points across the half-max radius "
            f"(need {opts.min_points_across_radius:g}); refine the grid"
        )


def radial_defect(phi: np.ndarray, grid: Grid) -> float:
    """Largest rise of the shell-averaged |φ| with radius, relative to the peak."""
    shells = grid.shell_averages(phi)
    shells = shells[np.isfinite(shells)]
    peak = float(np.abs(phi).max())
    if shells.size < 2 or peak == 0:
        return 0.0
    return max(float(np.max(np.diff(shells))), 0.0) / peak


# --- gradient flow --------------------------------------------------------------------

@dataclass
class _FlowResult:
    phi: np.ndarray
    mu: float
    residual: float
    iterations: int
    dtau: float
    energy_trace: list[float]


def _rayleigh(phi: np.ndarray, phi_hat: np.ndarray, mass: float, grid: Grid,
              params: ModelParams) -> tuple[np.ndarray, float, float]:
    """F(φ²), the Rayleigh frequency μ_N and the relative residual at μ_N."""
    F = nonlinearity(phi**2, params)
    lap_term = grid.ifft(0.5 * grid.k2 * phi_hat).real
    grad2 = float(grid.integrate(phi * lap_term))
    mu_n = (float(grid.integrate(F * phi**2)) - grad2) / mass
    res = grid.l2_norm(lap_term - F * phi + mu_n * phi) / (max(abs(mu_n), 1e-300) * np.sqrt(mass))
    return F, mu_n, res


def _flow_fixed_mass(phi: np.ndarray, mass: float, grid: Grid, params: ModelParams,
                     tol: float, budget: int, dtau: float) -> _FlowResult:
    kinetic = 0.5 * grid.k2
    phi = phi * np.sqrt(mass / grid.l2_norm(phi) ** 2)
    phi_hat = grid.fft(phi)
    energy = _fixed_mass_energy(phi, phi_hat, grid, params)
    F, mu_n, res = _rayleigh(phi, phi_hat, mass, grid, params)
    trace = [energy]
    it = 0
    while res > tol:
        if it >= budget:
            raise NonConvergence(f"gradient flow stalled at residual {res:.3e} after {it} iterations")
        s = float(F.max())
        while True:
            rhs = phi_hat + dtau * grid.fft((F + s) * phi)
            candidate = np.abs(grid.ifft(rhs / (1.0 + dtau * (kinetic + s))))
            candidate *= np.sqrt(mass / grid.l2_norm(candidate) ** 2)
            cand_hat = grid.fft(candidate)
            cand_energy = _fixed_mass_energy(candidate, cand_hat, grid, params)
            cand_F, cand_mu, cand_res = _rayleigh(candidate, cand_hat, mass, grid, params)
            if cand_energy <= energy + ENERGY_RTOL * abs(energy) or cand_res < res:
                break
            dtau *= 0.5
            if dtau < DTAU_MIN:
                raise NonConvergence("gradient-flow step rejected down to the minimum pseudo-time step")
        phi, phi_hat, energy = candidate, cand_hat, cand_energy
        F, mu_n, res = cand_F, cand_mu, cand_res
        trace.append(energy)
        dtau = min(dtau * 1.25, DTAU_MAX)
        it += 1
    return _FlowResult(phi, mu_n, res, it, dtau, trace)


def _flow_to_frequency(mu: float, phi: np.ndarray, grid: Grid, params: ModelParams,
                       opts: GroundStateOptions) -> tuple[np.ndarray, int, list[float]]:
    """Secant on log-mass until the fixed-mass minimizer has frequency μ (to MASS_MATCH)."""
    budget = opts.max_iter
    dtau = opts.dtau

    def attempt(log_mass: float) -> _FlowResult:
        nonlocal phi, budget, dtau
        mass = float(np.exp(log_mass))
        if mass < opts.collapse_mass:
            raise CollapseToZero(f"mass fell below {opts.collapse_mass:g}; mu={mu:g} outside the existence range")
        result = _flow_fixed_mass(phi, mass, grid, params, opts.flow_tol, budget, dtau)
        budget -= result.iterations
        phi, dtau = result.phi, max(result.dtau, opts.dtau)
        return result

    x0 = float(np.log(grid.l2_norm(phi) ** 2))
    result = attempt(x0)
    f0 = result.mu - mu
    if abs(f0) <= MASS_MATCH * mu:
        return result.phi, opts.max_iter - budget, result.energy_trace
    x1 = x0 + (0.1 if f0 < 0 else -0.1)
    for it in range(opts.max_secant):
        result = attempt(x1)
        f1 = result.mu - mu
        log.debug("secant %d: mass=%.10g mu_N=%.12g", it, np.exp(x1), result.mu)
        if abs(f1) <= MASS_MATCH * mu:
            return result.phi, opts.max_iter - budget, result.energy_trace
        if f1 == f0:
            raise NonConvergence("secant iteration on the mass stalled")
        slope = (f1 - f0) / (x1 - x0)
        if slope <= 0:
            raise ConvexityViolation(f"frequency does not increase with mass near mu={mu:g}")
        step = float(np.clip(-f1 / slope, -1.0, 1.0))
        x0, f0 = x1, f1
        x1 = x1 + step
    raise NonConvergence(f"mass secant did not reach mu={mu:g} in {opts.max_secant} iterations "
                         f"(last mu_N={result.mu:.12g})")


# --- Newton polish --------------------------------------------------------------------

def _newton_polish(phi: np.ndarray, mu: float, grid: Grid, params: ModelParams, opts: GroundStateOptions,
                   tol: float) -> tuple[np.ndarray, int]:
    """Newton on -½Δφ - F(φ²)φ + μφ = 0 with GMRES steps preconditioned by (½|k|² + μ)⁻¹.

    Iterates are kept even about the centre, which removes the translation
    kernel of the Jacobian.
    """
    shape, n = grid.shape, grid.size
    kinetic = 0.5 * grid.k2
    inverse_symbol = 1.0 / (kinetic + mu)

    def kinetic_term(f: np.ndarray) -> np.ndarray:
        return grid.ifft(kinetic * grid.fft(f)).real

    def residual_field(f: np.ndarray) -> np.ndarray:
        return kinetic_term(f) - nonlinearity(f**2, params) * f + mu * f

    def relative(res_field: np.ndarray, f: np.ndarray) -> float:
        return grid.l2_norm(res_field) / (mu * max(grid.l2_norm(f), 1e-300))

    preconditioner = LinearOperator(
        (n, n), dtype=float,
        matvec=lambda v: grid.ifft(inverse_symbol * grid.fft(v.reshape(shape))).real.ravel())

    phi = symmetrize(np.asarray(phi, dtype=float), grid)
    res_field = residual_field(phi)
    res = relative(res_field, phi)
    for it in range(opts.max_newton):
        if res <= tol:
            return phi, it
        m = phi**2
        weight = mu - nonlinearity(m, params) - 2.0 * nonlinearity_prime(m, params) * m

        def jacobian(v: np.ndarray, weight=weight) -> np.ndarray:
            f = v.reshape(shape)
            return (kinetic_term(f) + weight * f).ravel()

        step, info = gmres(LinearOperator((n, n), matvec=jacobian, dtype=float), -res_field.ravel(),
                           rtol=float(np.clip(res, 1e-12, 0.1)), atol=0.0, restart=GMRES_RESTART,
                           maxiter=GMRES_MAXITER, M=preconditioner)
        if info < 0:
            raise NonConvergence(f"GMRES breakdown in the Newton polish (info={info})")
        step = symmetrize(step.reshape(shape), grid)
        alpha = 1.0
        for _ in range(LINE_SEARCH_HALVINGS):
            trial = phi + alpha * step
            trial_field = residual_field(trial)
            trial_res = relative(trial_field, trial)
            if trial_res < res:
                break
            alpha *= 0.5
        else:
            raise NonConvergence(f"Newton polish stalled at residual {res:.3e} for mu={mu:g}")
        if grid.l2_norm(trial) ** 2 < opts.collapse_mass:
            raise CollapseToZero(f"Newton iterate collapsed to zero at mu={mu:g}")
        phi, res_field, res = trial, trial_field, trial_res
        log.debug("newton %d: residual=%.3e step=%.3g", it, res, alpha)
    if res <= tol:
        return phi, opts.max_newton
    raise NonConvergence(f"Newton polish reached residual {res:.3e} > {tol:.1e} "
                         f"after {opts.max_newton} steps for mu={mu:g}")


# --- drivers ---------------------------------------------------------------------------

def solve_ground_state(mu: float, grid: Grid, params: ModelParams,
                       opts: GroundStateOptions | None = None, *, with_derivative: bool = True,
                       seed: np.ndarray | None = None) -> GroundState:
    opts = opts or GroundStateOptions()
    if not mu > 0:
        raise ValueError(f"frequency must be positive, got {mu}")
    tol = opts.tol
    if with_derivative:
        # the centred difference divides solver error by 2h
        tol = max(1e-2 * tol, 1e-12)
    phi, mass, iterations, trace = _solve_at_frequency(mu, grid, params, opts, tol, seed)
    check_resolution(phi, grid, opts)
    ratio = grid.boundary_ratio(phi)
    if ratio > BOUNDARY_TOLERANCE:
        log.warning("ground state at the box boundary is %.2e of peak (> %.0e); enlarge the box",
                    ratio, BOUNDARY_TOLERANCE)
    defect = radial_defect(phi, grid)
    if defect > RADIAL_TOLERANCE:
        log.warning("ground state is not radially non-increasing: shell averages rise by %.2e of peak", defect)
    residual = equation_residual(phi, mu, grid, params)
    log.info("ground state mu=%.6g mass=%.6g residual=%.2e after %d iterations", mu, mass, residual, iterations)
    state = GroundState(mu=mu, phi=phi.astype(complex), dmu_phi=None, residual=residual, mass=mass,
                        grid=grid, params=params, iterations=iterations, radial_defect=defect,
                        energy_trace=np.asarray(trace))
    if with_derivative:
        d1, d2 = dmu_phi(mu, grid, params, opts, base=state, tol=tol)
        state.dmu_phi, state.d2mu_phi = d1, d2
        if state.convexity <= 0:
            log.warning("convexity condition fails at mu=%.6g: <dmu phi, phi> = %.3e", mu, state.convexity)
    return state


def _solve_at_frequency(mu: float, grid: Grid, params: ModelParams, opts: GroundStateOptions,
                        tol: float, seed: np.ndarray | None) -> tuple[np.ndarray, float, int, list[float]]:
    flow_iterations, trace = 0, []
    if seed is not None and equation_residual(np.real(seed), mu, grid, params) <= WARM_START_RESIDUAL:
        phi = np.real(seed).astype(float)
    else:
        phi = np.abs(seed).astype(float) if seed is not None else seed_profile(mu, grid, params)
        phi, flow_iterations, trace = _flow_to_frequency(mu, phi, grid, params, opts)
    phi, newton_steps = _newton_polish(phi, mu, grid, params, opts, tol)
    return phi, grid.l2_norm(phi) ** 2, flow_iterations + newton_steps, trace


def dmu_phi(mu: float, grid: Grid, params: ModelParams, opts: GroundStateOptions | None = None,
            h_mu: float | None = None, *, base: GroundState | None = None,
            tol: float | None = None) -> tuple[ComplexField, ComplexField]:
    """Centred differences (φ(μ+h) - φ(μ-h))/2h and the second difference."""
    opts = opts or GroundStateOptions()
    h = h_mu or opts.h_mu or 1e-3 * mu
    tol = tol or opts.tol
    if base is None:
        phi0, *_ = _solve_at_frequency(mu, grid, params, opts, tol, None)
    else:
        phi0 = base.phi.real
    plus, *_ = _solve_at_frequency(mu + h, grid, params, opts, tol, phi0)
    minus, *_ = _solve_at_frequency(mu - h, grid, params, opts, tol, phi0)
    d1 = (plus - minus) / (2 * h)
    d2 = (plus - 2 * phi0 + minus) / h**2
    return d1.astype(complex), d2.astype(complex)


def mass_curve(mus: list[float], grid: Grid, params: ModelParams,
               opts: GroundStateOptions | None = None) -> list[dict]:
    """Mass and convexity per μ; failures are recorded rather than raised."""
    rows = []
    for mu in mus:
        try:
            gs = solve_ground_state(mu, grid, params, opts)
            rows.append({"mu": mu, "converged": True, "mass": gs.mass, "residual": gs.residual,
                         "convexity": gs.convexity, "error": ""})
        except SolitonLabError as exc:
            rows.append({"mu": mu, "converged": False, "mass": float("nan"), "residual": float("nan"),
                         "convexity": float("nan"), "error": f"{type(exc).__name__}: {exc}"})
    return rows
