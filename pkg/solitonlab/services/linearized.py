"""Matrix linearization around the soliton.

Spinors Z = (R, R̄) carry the charge-transfer Hamiltonian

    𝓗 = 𝓗₀ + 𝓥₁ε + 𝓥₂,   𝓗₀ = diag(-½Δ, ½Δ),   𝓥₁ε = diag(V_ε, -V_ε).

At frequency μ the centred soliton operator is 𝓗₂(μ) = 𝓗₀ + 𝓥₂(μ) with

    𝓥₂(μ) = [[ μ - F - F'φ²,  -F'φ²       ],
             [ F'φ²,          -μ + F + F'φ² ]],   F = F(φ²), F' = dF/dm(φ²).

Operators at a general σ are the Galilei conjugates B_σ 𝓗₂(μ) B_σ* with
B_σ = B_{γ,a,υ} and (B_{β,y,υ} f)(x) = e^{i(β + υ·x)ϱ} f(x - y), ϱ = diag(1, -1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..core.errors import DegenerateNormalization
from ..core.grid import ComplexField, Grid, SpinorField, spinor
from ..core.logging import logger
from ..schemas.params import ModelParams
from .ground_state import GroundState
from .model import nonlinearity, nonlinearity_prime, potential_field
from .soliton import SolitonParams, group_action

log = logger.getChild("linearized")


# --- matrix potentials --------------------------------------------------------------

@dataclass
class MatrixPotential:
    """A 2×2 matrix per grid point."""

    v11: np.ndarray
    v12: np.ndarray
    v21: np.ndarray
    v22: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid) -> "MatrixPotential":
        z = np.zeros(grid.shape, dtype=complex)
        return cls(z, z.copy(), z.copy(), z.copy())

    def apply(self, z: SpinorField) -> SpinorField:
        return np.stack([self.v11 * z[0] + self.v12 * z[1], self.v21 * z[0] + self.v22 * z[1]])

    def adjoint(self) -> "MatrixPotential":
        return MatrixPotential(np.conj(self.v11), np.conj(self.v21), np.conj(self.v12), np.conj(self.v22))

    def __add__(self, other: "MatrixPotential") -> "MatrixPotential":
        return MatrixPotential(self.v11 + other.v11, self.v12 + other.v12,
                               self.v21 + other.v21, self.v22 + other.v22)

    def __sub__(self, other: "MatrixPotential") -> "MatrixPotential":
        return MatrixPotential(self.v11 - other.v11, self.v12 - other.v12,
                               self.v21 - other.v21, self.v22 - other.v22)

    def frobenius(self) -> np.ndarray:
        """Pointwise Frobenius norm."""
        return np.sqrt(np.abs(self.v11) ** 2 + np.abs(self.v12) ** 2
                       + np.abs(self.v21) ** 2 + np.abs(self.v22) ** 2)

    def structure_defect(self) -> float:
        """max of |v22 + conj v11| and |v21 + conj v12|; zero for potentials that preserve (R, R̄)."""
        return float(max(np.max(np.abs(self.v22 + np.conj(self.v11))),
                         np.max(np.abs(self.v21 + np.conj(self.v12)))))

    def max_abs(self) -> float:
        return float(self.frobenius().max())


def rho_matrix(grid: Grid, mu: float) -> MatrixPotential:
    """μϱ as a constant matrix potential."""
    one = np.full(grid.shape, mu, dtype=complex)
    zero = np.zeros(grid.shape, dtype=complex)
    return MatrixPotential(one, zero, zero.copy(), -one)


def v1_eps(grid: Grid, params: ModelParams, enabled: bool = True) -> MatrixPotential:
    v = potential_field(grid, params, enabled).astype(complex)
    zero = np.zeros(grid.shape, dtype=complex)
    return MatrixPotential(v, zero, zero.copy(), -v)


def _soliton_potential(w: np.ndarray, params: ModelParams, mu: float) -> MatrixPotential:
    m = np.abs(w) ** 2
    f0 = nonlinearity(m, params)
    f1 = nonlinearity_prime(m, params)
    diag = mu - f0 - f1 * m
    return MatrixPotential(diag.astype(complex), -f1 * w**2, f1 * np.conj(w) ** 2, -diag.astype(complex))


def v2_static(ground: GroundState, mu: Optional[float] = None) -> MatrixPotential:
    """𝓥₂(μ) of the centred soliton, including the μϱ shift."""
    mu = ground.mu if mu is None else mu
    return _soliton_potential(ground.profile(mu).real, ground.params, mu)


def v2_moving(w: np.ndarray, params: ModelParams) -> MatrixPotential:
    """𝓥₂(t, σ̃(t)) built directly from the moving soliton field w (no μ shift)."""
    return _soliton_potential(w, params, 0.0)


# --- Galilei transforms ---------------------------------------------------------------

def _theta(grid: Grid, beta: float, v: Sequence[float]) -> np.ndarray:
    theta = np.full(grid.shape, float(beta))
    for x, vj in zip(grid.coords, np.asarray(v, dtype=float)):
        theta = theta + vj * x
    return theta


def galilei(beta: float, y: Sequence[float], v: Sequence[float], f: SpinorField, grid: Grid) -> SpinorField:
    """B_{β,y,υ} f: upper × e^{i(β+υ·x)}, lower × e^{-i(β+υ·x)}, both shifted by y."""
    phase = np.exp(1j * _theta(grid, beta, v))
    shifted = grid.shift(f, y)
    return np.stack([phase * shifted[0], np.conj(phase) * shifted[1]])


def galilei_adjoint(beta: float, y: Sequence[float], v: Sequence[float], f: SpinorField,
                    grid: Grid) -> SpinorField:
    """B* = B_{-β,-y,0} B_{0,0,-υ}."""
    zero = np.zeros(grid.dim)
    boosted = galilei(0.0, zero, -np.asarray(v, dtype=float), f, grid)
    return galilei(-beta, -np.asarray(y, dtype=float), zero, boosted, grid)


def conjugate_potential(pot: MatrixPotential, beta: float, y: Sequence[float], v: Sequence[float],
                        grid: Grid) -> MatrixPotential:
    """Pointwise matrix of B V B*: entries translated by y, off-diagonals rotated by e^{±2iθ}."""
    rot = np.exp(2j * _theta(grid, beta, v))
    return MatrixPotential(grid.shift(pot.v11, y), rot * grid.shift(pot.v12, y),
                           np.conj(rot) * grid.shift(pot.v21, y), grid.shift(pot.v22, y))


def _sigma_transform(sigma: Optional[SolitonParams], dim: int) -> tuple[float, np.ndarray, np.ndarray]:
    if sigma is None:
        return 0.0, np.zeros(dim), np.zeros(dim)
    return sigma.gamma, sigma.a, sigma.v


# --- operators ------------------------------------------------------------------------

def apply_h0(z: SpinorField, grid: Grid) -> SpinorField:
    lap = grid.laplacian(z)
    return np.stack([-0.5 * lap[0], 0.5 * lap[1]])


def apply_h2(sigma: SolitonParams, z: SpinorField, ground: GroundState,
             potential: Optional[MatrixPotential] = None) -> SpinorField:
    """𝓗₂(σ)Z = B_σ (𝓗₀ + 𝓥₂(μ)) B_σ* Z."""
    grid = ground.grid
    pot = potential if potential is not None else v2_static(ground, sigma.mu)
    beta, y, v = sigma.gamma, sigma.a, sigma.v
    inner = galilei_adjoint(beta, y, v, z, grid)
    out = apply_h0(inner, grid) + pot.apply(inner)
    return galilei(beta, y, v, out, grid)


def apply_h2_adjoint(sigma: SolitonParams, z: SpinorField, ground: GroundState,
                     potential: Optional[MatrixPotential] = None) -> SpinorField:
    grid = ground.grid
    pot = (potential if potential is not None else v2_static(ground, sigma.mu)).adjoint()
    beta, y, v = sigma.gamma, sigma.a, sigma.v
    inner = galilei_adjoint(beta, y, v, z, grid)
    out = apply_h0(inner, grid) + pot.apply(inner)
    return galilei(beta, y, v, out, grid)


def apply_l_minus(f: np.ndarray, ground: GroundState, mu: Optional[float] = None) -> np.ndarray:
    """L₋ = -½Δ + μ - F(φ²)."""
    mu = ground.mu if mu is None else mu
    phi = ground.profile(mu).real
    return -0.5 * ground.grid.laplacian(f) + (mu - nonlinearity(phi**2, ground.params)) * f


def apply_l_plus(f: np.ndarray, ground: GroundState, mu: Optional[float] = None) -> np.ndarray:
    """L₊ = -½Δ + μ - F(φ²) - 2F'(φ²)φ²."""
    mu = ground.mu if mu is None else mu
    phi = ground.profile(mu).real
    m = phi**2
    return apply_l_minus(f, ground, mu) - 2.0 * nonlinearity_prime(m, ground.params) * m * f


# --- root space -----------------------------------------------------------------------

@dataclass
class RootSpace:
    """Generalized kernel of 𝓗₂ and of its adjoint, with the pairing normalizations.

    Ordering (2d+2 vectors): η₁, η₂, η_∂1..η_∂d, η_x1..η_xd, and the same for ξ.
    """

    sigma: SolitonParams
    etas: list[SpinorField]
    xis: list[SpinorField]
    pairs: list[tuple[int, int, complex]]
    grid: Grid = field(repr=False)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def n1(self) -> complex:
        return self.pairs[0][2]

    @property
    def n_ell(self) -> list[complex]:
        d = self.dim
        return [self.pairs[2 + k][2] for k in range(d)]

    def normalizations(self) -> dict[str, complex]:
        d = self.dim
        out = {"n1": self.n1}
        out.update({f"n{3 + k}": n for k, n in enumerate(self.n_ell[:d])})
        return out

    def gram(self) -> np.ndarray:
        """Cross pairings ⟨η_i, ξ_j⟩."""
        return np.array([[self.grid.inner(eta, xi) for xi in self.xis] for eta in self.etas])


def _centred_root_vectors(ground: GroundState, mu: float) -> tuple[list, list]:
    grid = ground.grid
    phi = ground.profile(mu).real
    dphi = ground.dmu_profile(mu).real
    grads = [g.real for g in grid.gradient(phi)]
    etas = [spinor(phi, -phi), spinor(-1j * dphi, -1j * dphi)]
    etas += [spinor(-1j * g, -1j * g) for g in grads]
    etas += [spinor(x * phi, -x * phi) for x in grid.coords]
    xis = [spinor(phi, phi), spinor(1j * dphi, -1j * dphi)]
    xis += [spinor(1j * g, -1j * g) for g in grads]
    xis += [spinor(x * phi, x * phi) for x in grid.coords]
    return etas, xis


def _pairings_for(etas: list, xis: list, grid: Grid) -> list[tuple[int, int, complex]]:
    d = grid.dim
    index = [(0, 1), (1, 0)]
    index += [(2 + k, 2 + d + k) for k in range(d)]
    index += [(2 + d + k, 2 + k) for k in range(d)]
    pairs = []
    for i, j in index:
        n = grid.inner(etas[i], xis[j])
        scale = grid.l2_norm(etas[i]) * grid.l2_norm(xis[j])
        if abs(n) <= 1e-12 * scale:
            raise DegenerateNormalization(f"pairing ⟨η{i + 1}, ξ{j + 1}⟩ vanishes ({abs(n):.3e})")
        pairs.append((i, j, n))
    return pairs


def build_root_space(ground: GroundState, sigma: Optional[SolitonParams] = None) -> RootSpace:
    """Root vectors at σ; σ = None means the centred soliton at the ground-state frequency."""
    grid = ground.grid
    if sigma is None:
        sigma = SolitonParams(a=np.zeros(grid.dim), v=np.zeros(grid.dim), gamma=0.0, mu=ground.mu)
    etas, xis = _centred_root_vectors(ground, sigma.mu)
    beta, y, v = sigma.gamma, sigma.a, sigma.v
    etas = [galilei(beta, y, v, e, grid) for e in etas]
    xis = [galilei(beta, y, v, x, grid) for x in xis]
    root = RootSpace(sigma=sigma, etas=etas, xis=xis, pairs=_pairings_for(etas, xis, grid), grid=grid)
    log.debug("root space at mu = %.6g: n1 = %s", sigma.mu, root.n1)
    return root


def jay(f: SpinorField) -> SpinorField:
    """𝒥 = [[0, 1], [-1, 0]]."""
    return np.stack([f[1], -f[0]])


def project_pb(z: SpinorField, root: RootSpace) -> SpinorField:
    grid = root.grid
    out = np.zeros_like(z, dtype=complex)
    for i, j, n in root.pairs:
        out = out + root.etas[i] * (grid.inner(z, root.xis[j]) / n)
    return out


def project_pc(z: SpinorField, root: RootSpace) -> SpinorField:
    return z - project_pb(z, root)


# --- moving frame ---------------------------------------------------------------------

@dataclass
class MovingFrame:
    """Phases and centres transporting frozen objects along the post-interaction path.

    β₀(t) = γ_T₀ + (μ_T₀ - |υ_T₀|²/2)t, y₀(t) = a_T₀ + υ_T₀t, and β(t), y(t) the
    accumulated integrals of -|υ - υ_T₀|²/2 + μ - μ_T₀ and υ - υ_T₀.
    """

    sigma_t0: SolitonParams
    times: np.ndarray
    beta: np.ndarray
    y: np.ndarray

    @classmethod
    def frozen(cls, sigma_t0: SolitonParams) -> "MovingFrame":
        return cls(sigma_t0=sigma_t0, times=np.zeros(1), beta=np.zeros(1), y=np.zeros((1, sigma_t0.dim)))

    @classmethod
    def from_path(cls, sigma_t0: SolitonParams, times: np.ndarray, v: np.ndarray, mu: np.ndarray) -> "MovingFrame":
        times = np.asarray(times, dtype=float)
        dv = np.asarray(v, dtype=float) - sigma_t0.v
        rate = -0.5 * np.sum(dv**2, axis=1) + np.asarray(mu, dtype=float) - sigma_t0.mu
        dt = np.diff(times)
        beta = np.concatenate([[0.0], np.cumsum(0.5 * dt * (rate[1:] + rate[:-1]))])
        y = np.vstack([np.zeros(sigma_t0.dim), np.cumsum(0.5 * dt[:, None] * (dv[1:] + dv[:-1]), axis=0)])
        return cls(sigma_t0=sigma_t0, times=times, beta=beta, y=y)

    def beta0(self, t: float) -> float:
        s = self.sigma_t0
        return s.gamma + (s.mu - 0.5 * float(np.dot(s.v, s.v))) * t

    def y0(self, t: float) -> np.ndarray:
        return self.sigma_t0.a + self.sigma_t0.v * t

    def beta_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.beta))

    def y_at(self, t: float) -> np.ndarray:
        return np.array([np.interp(t, self.times, col) for col in self.y.T])

    def b(self, t: float) -> np.ndarray:
        return self.y0(t) + self.y_at(t)

    def transform(self, t: float) -> tuple[float, np.ndarray, np.ndarray]:
        """(β, y, υ) of the combined transform T₀(t)T(t) = B_{β₀+β, b, υ_T₀}."""
        return self.beta0(t) + self.beta_at(t), self.b(t), self.sigma_t0.v


def moving_soliton(frame: MovingFrame, ground: GroundState, t: float) -> ComplexField:
    """w(σ̃(t)) = e^{i(υ_T₀·x + β₀ + β)} φ_{μ_T₀}(x - b(t))."""
    beta, b, v = frame.transform(t)
    return group_action(ground.profile(frame.sigma_t0.mu), b, v, beta, ground.grid)


def transport_root_space(root0: RootSpace, frame: MovingFrame, t: float) -> RootSpace:
    """Root vectors ξ̃_j = T₀T ξ_j, η̃_j = T₀T η_j of a centred root space."""
    grid = root0.grid
    s0 = root0.sigma
    if np.any(s0.a) or np.any(s0.v) or s0.gamma != 0.0:
        raise ValueError("transport needs the root space of the centred soliton")
    beta, b, v = frame.transform(t)
    etas = [galilei(beta, b, v, e, grid) for e in root0.etas]
    xis = [galilei(beta, b, v, x, grid) for x in root0.xis]
    sigma = SolitonParams(a=b, v=v, gamma=beta, mu=root0.sigma.mu)
    # the pairings are invariant under the unitary transport
    return RootSpace(sigma=sigma, etas=etas, xis=xis, pairs=root0.pairs, grid=grid)


def project_pb_time(t: float, frame: MovingFrame, root0: RootSpace, z: SpinorField) -> SpinorField:
    """P_b(t) = T₀(t)T(t) P_b(σ_T₀) T*(t)T₀*(t), through the transported root vectors."""
    return project_pb(z, transport_root_space(root0, frame, t))
