"""Soliton fields, the symmetry group action and the skew-orthogonal decomposition.

Fields use the lab phase convention of the rescaled initial datum,

    φ_σ = S_{aυγ} φ_μ = e^{i(υ·x + γ)} φ_μ(x - a),

so γ is the phase at the lab origin. The tangent vectors at σ are the group
images of the frame vectors z_a = -∇φ_μ, z_υ = i y φ_μ (= -𝒥yφ_μ with 𝒥 = i⁻¹),
z_γ = iφ_μ and z_μ = ∂μφ_μ, with y the frame coordinate centred on the soliton.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..core.errors import NewtonDivergence, SingularJacobian
from ..core.grid import ComplexField, Grid
from ..core.logging import logger
from ..schemas.params import DecomposeOptions, SigmaSpec
from .ground_state import GroundState

log = logger.getChild("soliton")

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class SolitonParams:
    a: np.ndarray
    v: np.ndarray
    gamma: float
    mu: float

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError(f"soliton frequency must be positive, got {self.mu}")
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).reshape(-1))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(-1))
        if self.a.shape != self.v.shape:
            raise ValueError("position and velocity must have the same dimension")
        object.__setattr__(self, "gamma", float(self.gamma) % TWO_PI)

    @property
    def dim(self) -> int:
        return self.a.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.a, self.v, [self.gamma, self.mu]])

    @classmethod
    def from_vector(cls, vec: Sequence[float], dim: int) -> "SolitonParams":
        vec = np.asarray(vec, dtype=float)
        return cls(a=vec[:dim], v=vec[dim:2 * dim], gamma=vec[2 * dim], mu=vec[2 * dim + 1])

    def replace(self, **changes) -> "SolitonParams":
        return replace(self, **changes)

    def phase_distance(self, other: "SolitonParams") -> float:
        return float(abs(np.angle(np.exp(1j * (self.gamma - other.gamma)))))

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "v": self.v.tolist(), "gamma": self.gamma, "mu": self.mu}


def _fit(vec: Sequence[float], dim: int) -> np.ndarray:
    out = np.zeros(dim)
    vals = np.asarray(vec, dtype=float)[:dim]
    out[: vals.size] = vals
    return out


def initial_sigma(spec: SigmaSpec, eps: float, dim: int) -> SolitonParams:
    """Rescaled initial soliton: a₀ = ā₀/ε, υ₀ = ε ῡ₀."""
    return SolitonParams(a=_fit(spec.a_bar, dim) / eps, v=eps * _fit(spec.v_bar, dim),
                         gamma=spec.gamma, mu=spec.mu)


def unscaled_sigma(sigma: SolitonParams, eps: float) -> SolitonParams:
    return sigma.replace(a=eps * sigma.a, v=sigma.v / eps)


# --- group action -------------------------------------------------------------------

def _plane_phase(grid: Grid, v: np.ndarray, gamma: float) -> np.ndarray:
    phase = np.full(grid.shape, gamma, dtype=float)
    for x, vj in zip(grid.coords, v):
        phase = phase + vj * x
    return np.exp(1j * phase)


def group_action(f: np.ndarray, a: Sequence[float], v: Sequence[float], gamma: float, grid: Grid) -> ComplexField:
    """S_{aυγ} f = e^{i(υ·x + γ)} f(x - a)."""
    return _plane_phase(grid, np.asarray(v, dtype=float), gamma) * grid.shift(f, a)


def group_action_inverse(u: np.ndarray, a: Sequence[float], v: Sequence[float], gamma: float,
                         grid: Grid) -> ComplexField:
    a = np.asarray(a, dtype=float)
    return grid.shift(np.conj(_plane_phase(grid, np.asarray(v, dtype=float), gamma)) * u, -a)


def make_soliton(sigma: SolitonParams, ground: GroundState) -> ComplexField:
    grid = ground.grid
    if sigma.dim != grid.dim:
        raise ValueError(f"soliton parameters are {sigma.dim}-dimensional, grid is {grid.dim}-dimensional")
    return group_action(ground.profile(sigma.mu), sigma.a, sigma.v, sigma.gamma, grid)


def momentum(u: np.ndarray, grid: Grid) -> np.ndarray:
    """P = ⟨u, -i∇u⟩ (real pairing), one component per axis."""
    return np.array([grid.real_inner(u, -1j * g) for g in grid.gradient(u)])


# --- tangent frame ------------------------------------------------------------------

def frame_vectors(phi: np.ndarray, dphi: np.ndarray, grid: Grid) -> list[ComplexField]:
    """[z_a (dim), z_υ (dim), z_γ, z_μ] in the soliton frame."""
    grads = grid.gradient(phi)
    zs = [-g for g in grads]
    zs += [1j * x * phi for x in grid.coords]
    zs += [1j * phi, dphi.astype(complex)]
    return zs


def frame_mu_derivatives(dphi: np.ndarray, d2phi: np.ndarray, grid: Grid) -> list[ComplexField]:
    return frame_vectors(dphi, d2phi, grid)


@dataclass
class TangentFrame:
    z_a: list[ComplexField]
    z_v: list[ComplexField]
    z_gamma: ComplexField
    z_mu: ComplexField

    def vectors(self) -> list[ComplexField]:
        return [*self.z_a, *self.z_v, self.z_gamma, self.z_mu]


def tangent_frame(sigma: SolitonParams, ground: GroundState) -> TangentFrame:
    """Tangent vectors at φ_σ (frame vectors transported by S_{aυγ})."""
    grid = ground.grid
    zs = frame_vectors(ground.profile(sigma.mu), ground.dmu_profile(sigma.mu), grid)
    moved = [group_action(z, sigma.a, sigma.v, sigma.gamma, grid) for z in zs]
    d = grid.dim
    return TangentFrame(z_a=moved[:d], z_v=moved[d:2 * d], z_gamma=moved[2 * d], z_mu=moved[2 * d + 1])


def symplectic_form(u: np.ndarray, v: np.ndarray, grid: Grid) -> float:
    """ω(u, v) = Im∫ u v̄."""
    return grid.inner(u, v).imag


def project_off_manifold(zeta: np.ndarray, ground: GroundState, mu: float | None = None) -> ComplexField:
    """Remove tangent components from a frame field so that ω(ζ, z) = 0 for every z."""
    grid = ground.grid
    mu = ground.mu if mu is None else mu
    zs = frame_vectors(ground.profile(mu), ground.dmu_profile(mu), grid)
    omega = np.array([[symplectic_form(zl, zk, grid) for zl in zs] for zk in zs])
    rhs = np.array([symplectic_form(zeta, zk, grid) for zk in zs])
    coeffs = np.linalg.solve(omega, rhs)
    return zeta - sum(c * z for c, z in zip(coeffs, zs))


# --- decomposition ------------------------------------------------------------------

@dataclass
class Decomposition:
    sigma: SolitonParams
    r: ComplexField
    orth_residual: float
    iterations: int = 0
    pairings: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _pairings(u: np.ndarray, vec: np.ndarray, ground: GroundState):
    grid = ground.grid
    d = grid.dim
    a, v, gamma, mu = vec[:d], vec[d:2 * d], vec[2 * d], vec[2 * d + 1]
    w = group_action_inverse(u, a, v, gamma, grid)
    psi = ground.profile(mu)
    zs = frame_vectors(psi, ground.dmu_profile(mu), grid)
    r = w - psi
    values = np.array([symplectic_form(r, z, grid) for z in zs])
    scale = grid.l2_norm(u) * np.array([grid.l2_norm(z) for z in zs])
    return values, values / scale, w, r, zs


def _jacobian(u: np.ndarray, vec: np.ndarray, w: np.ndarray, r: np.ndarray, zs: list,
              ground: GroundState) -> np.ndarray:
    grid = ground.grid
    d = grid.dim
    a, v, gamma, mu = vec[:d], vec[d:2 * d], vec[2 * d], vec[2 * d + 1]
    # derivatives of r = S⁻¹u - φ_μ with respect to (a, υ, γ, μ)
    q = np.conj(_plane_phase(grid, v, gamma)) * u
    dr = list(grid.gradient(w))
    dr += [grid.shift(-1j * x * q, -a) for x in grid.coords]
    dr += [-1j * w, -ground.dmu_profile(mu)]
    dzs = frame_mu_derivatives(ground.dmu_profile(mu), ground.d2mu_profile(), grid)
    n = 2 * d + 2
    jac = np.empty((n, n))
    for k, z in enumerate(zs):
        for col, drl in enumerate(dr):
            jac[k, col] = symplectic_form(drl, z, grid)
        jac[k, n - 1] += symplectic_form(r, dzs[k], grid)
    return jac


def decompose(u: np.ndarray, sigma_guess: SolitonParams, ground: GroundState,
              opts: DecomposeOptions | None = None) -> Decomposition:
    """Newton iteration on ω(u - φ_σ, z) = 0 for all tangent z."""
    opts = opts or DecomposeOptions()
    d = ground.grid.dim
    vec = sigma_guess.as_vector()
    values, scaled, w, r, zs = _pairings(u, vec, ground)
    res = float(np.max(np.abs(scaled)))
    it = 0
    while res > opts.tol:
        if it >= opts.max_iter:
            raise NewtonDivergence(f"decomposition did not converge in {opts.max_iter} steps (residual {res:.3e})")
        jac = _jacobian(u, vec, w, r, zs, ground)
        cond = np.linalg.cond(jac)
        if not np.isfinite(cond) or cond > opts.cond_limit:
            raise SingularJacobian(f"pairing Jacobian is singular (condition number {cond:.3e})")
        step = np.linalg.solve(jac, -values)
        lam = 1.0
        for _ in range(opts.max_halvings):
            trial = vec + lam * step
            if trial[-1] > 0:
                t_values, t_scaled, t_w, t_r, t_zs = _pairings(u, trial, ground)
                t_res = float(np.max(np.abs(t_scaled)))
                if t_res < res:
                    break
            lam *= 0.5
        else:
            if res <= 1e3 * opts.tol:
                # roundoff floor just above tolerance
                break
            raise NewtonDivergence(f"no damped Newton step decreases the pairing residual ({res:.3e})")
        vec, values, scaled, w, r, zs, res = trial, t_values, t_scaled, t_w, t_r, t_zs, t_res
        it += 1
        if np.max(np.abs(lam * step)) < 1e-15 * max(1.0, np.max(np.abs(vec))):
            break
    sigma = SolitonParams.from_vector(vec, d)
    log.debug("decomposition converged in %d steps: residual %.2e", it, res)
    return Decomposition(sigma=sigma, r=r, orth_residual=res, iterations=it, pairings=scaled)
