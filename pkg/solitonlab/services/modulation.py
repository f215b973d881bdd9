"""Modulation equations for the soliton parameters.

The leading field is the classical particle in the potential,

    ȧ = υ,  υ̇ = -∇V_ε(a),  γ̇ = μ - |υ|²/2 - V_ε(a),  μ̇ = 0.

The full field follows from differentiating the skew-orthogonality conditions
along the equation for the frame fluctuation r, where u = S_σ(φ_μ + r):

    i∂_t r = L r - N(r) + E - iμ̇ ∂μφ,
    E = α_γ ψ + (α_υ·y) ψ + iα_a·∇ψ + 𝓡_V ψ,   ψ = φ_μ + r,

with α_a = ȧ - υ, α_υ = υ̇ + ∇V_ε(a) and α_γ = γ̇ + υ̇·a + |υ|²/2 + V_ε(a) - μ
(lab phase convention). Requiring d/dt ω(r, z) = 0 for every tangent z gives a
(2d+2)-square linear system in (α_a, α_υ, α_γ, μ̇); its r-independent part is
invertible whenever m'(μ) ≠ 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core.errors import ConvexityViolation
from ..core.logging import logger
from ..schemas.params import ModelParams
from .ground_state import GroundState
from .model import grad_v_eps, nonlinearity, nonlinearity_prime, v_eps
from .soliton import SolitonParams, frame_mu_derivatives, frame_vectors, symplectic_form

log = logger.getChild("modulation")


@dataclass(frozen=True, eq=False)
class SolitonRate:
    a_dot: np.ndarray
    v_dot: np.ndarray
    gamma_dot: float
    mu_dot: float

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.a_dot, self.v_dot, [self.gamma_dot, self.mu_dot]])


def _potential_at(a: np.ndarray, params: ModelParams, with_potential: bool) -> tuple[float, np.ndarray]:
    if not with_potential:
        return 0.0, np.zeros_like(a)
    return float(v_eps(a, params)), np.asarray(grad_v_eps(a, params), dtype=float)


def classical_energy(a: np.ndarray, v: np.ndarray, params: ModelParams, with_potential: bool = True) -> float:
    """½|υ|² + ε²V(εa)."""
    pot, _ = _potential_at(np.asarray(a, dtype=float), params, with_potential)
    return 0.5 * float(np.dot(v, v)) + pot


def modulation_rhs_leading(sigma: SolitonParams, params: ModelParams, with_potential: bool = True) -> SolitonRate:
    pot, grad = _potential_at(sigma.a, params, with_potential)
    return SolitonRate(a_dot=sigma.v.copy(), v_dot=-grad,
                       gamma_dot=sigma.mu - 0.5 * float(np.dot(sigma.v, sigma.v)) - pot, mu_dot=0.0)


# --- full system ----------------------------------------------------------------

@dataclass
class FullModulation:
    rate: SolitonRate
    alpha: np.ndarray
    defect: float  # max |Mα - b| of the exact linear system


def remainder_potential(sigma: SolitonParams, ground: GroundState, with_potential: bool = True) -> np.ndarray:
    """𝓡_V(y) = V_ε(y + a) - V_ε(a) - ∇V_ε(a)·y in the soliton frame."""
    grid = ground.grid
    if not with_potential:
        return np.zeros(grid.shape)
    pot, grad = _potential_at(sigma.a, ground.params, True)
    lab = grid.wrap(grid.points + sigma.a)
    out = np.asarray(v_eps(lab, ground.params)) - pot
    for y, gj in zip(grid.coords, grad):
        out = out - gj * y
    return out


def modulation_rhs_full(sigma: SolitonParams, r: np.ndarray, ground: GroundState,
                        alpha_guess: Optional[np.ndarray] = None, *, with_potential: bool = True,
                        passes: Optional[int] = 1) -> FullModulation:
    """Full modulation field at (σ, r).

    ``passes`` fixed-point sweeps start from ``alpha_guess`` and invert only the
    r-independent part of the system; ``passes=None`` solves it exactly.
    """
    grid, params = ground.grid, ground.params
    d = grid.dim
    mu = sigma.mu
    phi = ground.profile(mu)
    dphi = ground.dmu_profile(mu)
    zs = frame_vectors(phi, dphi, grid)
    dzs = frame_mu_derivatives(dphi, ground.d2mu_profile(), grid)

    m2 = np.abs(phi) ** 2
    f0 = nonlinearity(m2, params)
    f1 = nonlinearity_prime(m2, params) * m2
    psi = phi + r
    lin_r = -0.5 * grid.laplacian(r) + mu * r - f0 * r - f1 * (r + np.conj(r))
    nonlin = nonlinearity(np.abs(psi) ** 2, params) * psi - f0 * phi - (f0 + f1) * r - f1 * np.conj(r)
    r_v = remainder_potential(sigma, ground, with_potential)

    def columns(field_: np.ndarray) -> list[np.ndarray]:
        cols = [1j * g for g in grid.gradient(field_)]
        cols += [y * field_ for y in grid.coords]
        cols.append(field_)
        return cols

    n = 2 * d + 2
    full = np.empty((n, n))
    base = np.empty((n, n))
    rhs = np.empty(n)
    full_cols, base_cols = columns(psi), columns(phi)
    for k, z in enumerate(zs):
        for j in range(n - 1):
            full[k, j] = grid.real_inner(full_cols[j], z)
            base[k, j] = grid.real_inner(base_cols[j], z)
        base[k, n - 1] = symplectic_form(dphi, z, grid)
        full[k, n - 1] = base[k, n - 1] - symplectic_form(r, dzs[k], grid)
        rhs[k] = (-grid.real_inner(lin_r, z) + grid.real_inner(nonlin, z)
                  - grid.real_inner(r_v * psi, z))

    cond = np.linalg.cond(base)
    if not np.isfinite(cond) or cond > 1e14:
        raise ConvexityViolation(f"modulation system is singular at mu = {mu} (m'(mu) vanishes?)")
    if passes is None:
        alpha = np.linalg.solve(full, rhs)
    else:
        alpha = np.zeros(n) if alpha_guess is None else np.asarray(alpha_guess, dtype=float).copy()
        for _ in range(passes):
            alpha = np.linalg.solve(base, rhs - (full - base) @ alpha)
    defect = float(np.max(np.abs(full @ alpha - rhs)))

    pot, grad = _potential_at(sigma.a, params, with_potential)
    a_dot = sigma.v + alpha[:d]
    v_dot = alpha[d:2 * d] - grad
    gamma_dot = alpha[2 * d] + mu - 0.5 * float(np.dot(sigma.v, sigma.v)) - pot - float(np.dot(v_dot, sigma.a))
    rate = SolitonRate(a_dot=a_dot, v_dot=v_dot, gamma_dot=gamma_dot, mu_dot=float(alpha[2 * d + 1]))
    return FullModulation(rate=rate, alpha=alpha, defect=defect)


# --- classical integration ------------------------------------------------------

@dataclass
class ModulationPath:
    times: np.ndarray
    a: np.ndarray
    v: np.ndarray
    gamma: np.ndarray  # unwrapped
    mu: np.ndarray
    y: np.ndarray
    theta_integral: np.ndarray
    energy: np.ndarray
    params: Optional[ModelParams] = field(default=None, repr=False)

    def at(self, t: float) -> SolitonParams:
        """Linear interpolation of the sampled path."""
        a = np.array([np.interp(t, self.times, col) for col in self.a.T])
        v = np.array([np.interp(t, self.times, col) for col in self.v.T])
        return SolitonParams(a=a, v=v, gamma=float(np.interp(t, self.times, self.gamma)),
                             mu=float(np.interp(t, self.times, self.mu)))

    @property
    def energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / max(abs(e0), 1e-300))

    def final(self) -> SolitonParams:
        return SolitonParams(a=self.a[-1], v=self.v[-1], gamma=self.gamma[-1], mu=self.mu[-1])


def integrate_modulation(sigma0: SolitonParams, t_end: float, dt: float, params: ModelParams,
                         with_potential: bool = True, sample_every: int = 1) -> ModulationPath:
    """Kick-drift-kick leapfrog on (a, υ), midpoint rule for γ, y and the phase integral.

    y solves ẏ = υ with y(0) = a(0); the phase integral is ∫(υ̇·y + |υ|²/2 - μ).
    """
    if dt <= 0 or t_end < 0:
        raise ValueError("dt must be positive and t_end non-negative")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    n_steps = max(int(round(t_end / dt)), 1) if t_end > 0 else 0
    h = t_end / n_steps if n_steps else dt

    def force(a: np.ndarray) -> np.ndarray:
        return -_potential_at(a, params, with_potential)[1]

    a = sigma0.a.copy()
    v = sigma0.v.copy()
    gamma, mu = sigma0.gamma, sigma0.mu
    y = a.copy()
    theta = 0.0
    f = force(a)
    rows = [(0.0, a.copy(), v.copy(), gamma, y.copy(), theta)]
    for step in range(1, n_steps + 1):
        v_half = v + 0.5 * h * f
        a_new = a + h * v_half
        f = force(a_new)
        v_new = v_half + 0.5 * h * f
        pot_mid, _ = _potential_at(0.5 * (a + a_new), params, with_potential)
        gamma += h * (mu - 0.5 * float(np.dot(v_half, v_half)) - pot_mid)
        y_new = y + h * v_half
        v_rate = (v_new - v) / h
        theta += h * (float(np.dot(v_rate, 0.5 * (y + y_new))) + 0.5 * float(np.dot(v_half, v_half)) - mu)
        a, v, y = a_new, v_new, y_new
        if step % sample_every == 0 or step == n_steps:
            rows.append((step * h, a.copy(), v.copy(), gamma, y.copy(), theta))

    times = np.array([row[0] for row in rows])
    a_arr = np.array([row[1] for row in rows])
    v_arr = np.array([row[2] for row in rows])
    energy = np.array([classical_energy(ai, vi, params, with_potential) for ai, vi in zip(a_arr, v_arr)])
    path = ModulationPath(times=times, a=a_arr, v=v_arr, gamma=np.array([row[3] for row in rows]),
                          mu=np.full(len(rows), mu), y=np.array([row[4] for row in rows]),
                          theta_integral=np.array([row[5] for row in rows]), energy=energy, params=params)
    log.debug("integrated modulation ODE: %d steps, energy drift %.2e", n_steps, path.energy_drift)
    return path
