"""Spectral probes of L₊, L₋ and the matrix operator 𝓗₂ (matrix-free, Lanczos / GMRES)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, gmres

from ..core.errors import EigenNonConvergence
from ..core.logging import logger
from .ground_state import GroundState
from .linearized import RootSpace, apply_h2, apply_h2_adjoint, apply_l_minus, apply_l_plus, build_root_space, v2_static

log = logger.getChild("spectral")


@dataclass
class SpectralReport:
    mu: float
    l_minus_bottom: list[float]
    l_plus_bottom: list[float]
    l_plus_near_zero: list[float]
    l_plus_negative_count: int
    l_minus_phi_residual: float
    l_plus_translation_residuals: list[float]
    gram_singular_values: list[float]
    kernel_residuals: list[float]
    adjoint_kernel_residuals: list[float]
    near_kernel_count: int
    root_space_rank_estimate: int
    thresholds: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _real_operator(apply, n: int, shape: tuple[int, ...]) -> LinearOperator:
    def matvec(x: np.ndarray) -> np.ndarray:
        return apply(x.reshape(shape)).real.ravel()

    return LinearOperator((n, n), matvec=matvec, dtype=float)


def _bottom_eigenvalues(op: LinearOperator, k: int, tol: float, maxiter: int, v0: np.ndarray) -> np.ndarray:
    try:
        vals = eigsh(op, k=k, which="SA", tol=tol, maxiter=maxiter, v0=v0,
                     ncv=min(op.shape[0] - 1, max(2 * k + 1, 40)), return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise EigenNonConvergence(f"Lanczos did not converge for {k} eigenvalues: {exc}") from exc
    return np.sort(vals)


def h2_operator_scale(ground: GroundState) -> float:
    """Bound on ‖𝓗₂‖ used to scale near-kernel thresholds."""
    return 0.5 * ground.grid.k2_max + abs(ground.mu) + float(np.max(np.abs(v2_static(ground).frobenius())))


def spectral_probe(ground: GroundState, *, n_minus: int = 2, n_plus: Optional[int] = None,
                   gram_threshold: float = 1e-8, kernel_threshold: float = 1e-4,
                   tol: float = 1e-10, maxiter: int = 20000, seed: int = 0) -> SpectralReport:
    """Bottom of L₋ and L₊, kernel residuals, and the root-space rank estimate.

    The rank counts the analytic root vectors η_j with ‖𝓗₂²η_j‖ ≤ kernel_threshold·‖𝓗₂‖²·‖η_j‖
    that are also linearly independent (Gram singular values above gram_threshold·max).
    """
    grid, mu = ground.grid, ground.mu
    d = grid.dim
    n_plus = n_plus or d + 2
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(grid.size)
    phi = ground.phi.real

    lm = _real_operator(lambda f: apply_l_minus(f, ground), grid.size, grid.shape)
    lp = _real_operator(lambda f: apply_l_plus(f, ground), grid.size, grid.shape)
    l_minus = _bottom_eigenvalues(lm, n_minus, tol, maxiter, v0)
    l_plus = _bottom_eigenvalues(lp, n_plus, tol, maxiter, v0)
    scale_l = 0.5 * grid.k2_max + mu
    near_zero = [float(v) for v in l_plus if abs(v) <= 1e-3 * scale_l]

    phi_norm = grid.l2_norm(mu * phi)
    lm_res = grid.l2_norm(apply_l_minus(phi, ground).real) / phi_norm
    lp_res = [grid.l2_norm(apply_l_plus(g.real, ground).real) / (mu * grid.l2_norm(g.real))
              for g in grid.gradient(phi)]

    root = build_root_space(ground)
    gram = np.array([[grid.inner(a, b) for b in root.etas] for a in root.etas])
    svals = np.linalg.svd(gram, compute_uv=False)
    independent = int(np.sum(svals > gram_threshold * svals.max()))

    h_scale = h2_operator_scale(ground)
    pot = v2_static(ground)
    sigma = root.sigma
    kernel, kernel_adj = [], []
    for eta, xi in zip(root.etas, root.xis):
        h2 = apply_h2(sigma, apply_h2(sigma, eta, ground, pot), ground, pot)
        kernel.append(grid.l2_norm(h2) / (h_scale**2 * grid.l2_norm(eta)))
        h2a = apply_h2_adjoint(sigma, apply_h2_adjoint(sigma, xi, ground, pot), ground, pot)
        kernel_adj.append(grid.l2_norm(h2a) / (h_scale**2 * grid.l2_norm(xi)))
    in_kernel = [j for j, res in enumerate(kernel) if res <= kernel_threshold]
    if in_kernel:
        sub = gram[np.ix_(in_kernel, in_kernel)]
        sub_s = np.linalg.svd(sub, compute_uv=False)
        rank = int(np.sum(sub_s > gram_threshold * sub_s.max()))
    else:
        rank = 0
    expected = 2 * d + 2
    if rank != expected:
        log.warning("discrete root space rank estimate is %d, expected %d", rank, expected)
    log.info("spectral probe at mu = %.4g: L- bottom %.3e, rank %d", mu, l_minus[0], rank)
    return SpectralReport(
        mu=mu, l_minus_bottom=l_minus.tolist(), l_plus_bottom=l_plus.tolist(), l_plus_near_zero=near_zero,
        l_plus_negative_count=int(np.sum(l_plus < -1e-3 * scale_l)), l_minus_phi_residual=lm_res,
        l_plus_translation_residuals=lp_res, gram_singular_values=svals.tolist(), kernel_residuals=kernel,
        adjoint_kernel_residuals=kernel_adj, near_kernel_count=len(in_kernel),
        root_space_rank_estimate=min(rank, independent),
        thresholds={"gram": gram_threshold, "kernel": kernel_threshold, "h2_scale": h_scale})


@dataclass
class EmbeddedProbe:
    shift: float
    localisation: float
    residual: float
    rayleigh: float


def embedded_eigenvalue_probe(ground: GroundState, shifts: Optional[Sequence[float]] = None, *,
                              steps: int = 4, radius: float = 6.0, gmres_rtol: float = 1e-6,
                              gmres_maxiter: int = 20, seed: int = 0) -> list[EmbeddedProbe]:
    """Inverse iteration on 𝓗₂ - s at shifts in ±(μ, μ + 5].

    A converged embedded eigenvector would be localised (most of its mass inside
    ``radius``) with a small residual; continuum iterates spread over the box.
    """
    grid, mu = ground.grid, ground.mu
    if shifts is None:
        base = mu + np.array([0.5, 1.5, 3.0, 5.0])
        shifts = np.concatenate([base, -base])
    root = build_root_space(ground)
    pot = v2_static(ground)
    sigma = root.sigma
    shape = (2, *grid.shape)
    n = 2 * grid.size
    ball = grid.radius() <= radius
    rng = np.random.default_rng(seed)
    out = []
    for s in shifts:
        def matvec(x: np.ndarray, s=s) -> np.ndarray:
            z = x.reshape(shape)
            return (apply_h2(sigma, z, ground, pot) - s * z).ravel()

        op = LinearOperator((n, n), matvec=matvec, dtype=complex)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        for _ in range(steps):
            y, info = gmres(op, x, rtol=gmres_rtol, restart=50, maxiter=gmres_maxiter)
            if not np.all(np.isfinite(y)):
                raise EigenNonConvergence(f"inverse iteration produced non-finite iterate at shift {s}")
            x = y / np.linalg.norm(y)
        z = x.reshape(shape)
        hz = apply_h2(sigma, z, ground, pot)
        rayleigh = complex(np.vdot(z, hz) / np.vdot(z, z))
        residual = float(np.linalg.norm(hz - rayleigh * z) / np.linalg.norm(z))
        density = np.sum(np.abs(z) ** 2, axis=0)
        out.append(EmbeddedProbe(shift=float(s), localisation=float(density[ball].sum() / density.sum()),
                                 residual=residual, rayleigh=float(rayleigh.real)))
    return out


__all__ = ["SpectralReport", "spectral_probe", "EmbeddedProbe", "embedded_eigenvalue_probe", "RootSpace"]
