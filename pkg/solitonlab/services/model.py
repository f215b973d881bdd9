"""Saturated nonlinearity F_ε, its derivative and antiderivative, and the bump potential.

F_ε(m) = m^{p/2} · g(m) / (θ ε^{-2r/p} + g(m)) with g(m) = m^{r/2}, where m = |u|².
The evolution equation uses F = F_1; the ``nonlinearity*`` helpers fix ε = 1.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicHermiteSpline

from ..core.errors import ConfigurationError, QuadratureError
from ..core.grid import Grid
from ..core.logging import logger
from ..schemas.params import ModelParams

log = logger.getChild("model")

# log-spaced antiderivative table
TABLE_LOG10_MIN = -16.0
TABLE_LOG10_MAX = 6.0
TABLE_NODES_PER_DECADE = 200

ArrayLike = float | npt.NDArray[np.float64]


def _saturation(params: ModelParams, eps: float | None) -> float:
    e = params.eps if eps is None else eps
    return params.theta * e ** (-2.0 * params.r / params.p)


def _as_modulus(m: npt.ArrayLike) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise ConfigurationError("modulus-squared argument must be non-negative")
    return m


def f_eps(m: npt.ArrayLike, params: ModelParams, eps: float | None = None) -> ArrayLike:
    m = _as_modulus(m)
    c = _saturation(params, eps)
    g = m ** (params.r / 2)
    return m ** (params.p / 2) * g / (c + g)


def f_eps_prime(m: npt.ArrayLike, params: ModelParams, eps: float | None = None) -> ArrayLike:
    """dF/dm; vanishes at m = 0 since p + r > 2."""
    m = _as_modulus(m)
    c = _saturation(params, eps)
    s = (params.p + params.r) / 2
    g = m ** (params.r / 2)
    return m ** (s - 1) * (s * c + 0.5 * params.p * g) / (c + g) ** 2


@dataclass(frozen=True)
class _AntiderivativeTable:
    log_m: np.ndarray
    log_g: np.ndarray
    spline: CubicHermiteSpline
    slope0: float
    params: ModelParams

    @property
    def m_min(self) -> float:
        return float(np.exp(self.log_m[0]))

    @property
    def m_max(self) -> float:
        return float(np.exp(self.log_m[-1]))


def _quad_half_f(a: float, b: float, params: ModelParams) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(lambda s: f_eps(s, params), a, b, epsabs=0.0, epsrel=1e-13, limit=200)
        except IntegrationWarning as exc:
            raise QuadratureError(f"quadrature of F on [{a:g}, {b:g}] did not converge: {exc}") from exc
    return 0.5 * value


@lru_cache(maxsize=32)
def _antiderivative_table(params: ModelParams) -> _AntiderivativeTable:
    n = int((TABLE_LOG10_MAX - TABLE_LOG10_MIN) * TABLE_NODES_PER_DECADE) + 1
    m = np.logspace(TABLE_LOG10_MIN, TABLE_LOG10_MAX, n)
    g = np.empty(n)
    g[0] = _quad_half_f(0.0, m[0], params)
    for i in range(1, n):
        g[i] = g[i - 1] + _quad_half_f(m[i - 1], m[i], params)
    if np.any(g <= 0) or not np.all(np.isfinite(g)):
        raise QuadratureError("antiderivative table is not positive; parameters are pathological")
    # Hermite data in log-log coordinates with exact slopes m F(m) / (2 G)
    slopes = m * f_eps(m, params) / (2.0 * g)
    log_m, log_g = np.log(m), np.log(g)
    log.debug("built antiderivative table: %d nodes for %s", n, params)
    return _AntiderivativeTable(log_m, log_g, CubicHermiteSpline(log_m, log_g, slopes), float(slopes[0]), params)


def g_antiderivative(m: npt.ArrayLike, params: ModelParams, eps: float | None = None) -> ArrayLike:
    """G(m) = ½∫₀^m F_ε(s) ds, so that 𝓕(u) = ∫ G(|u|²)."""
    m = _as_modulus(m)
    p = params if eps is None else params.with_eps(eps)
    table = _antiderivative_table(p)
    scalar = m.ndim == 0
    m = np.atleast_1d(m)
    out = np.zeros_like(m)

    low = (m > 0) & (m < table.m_min)
    mid = (m >= table.m_min) & (m <= table.m_max)
    high = m > table.m_max
    if np.any(low):
        # power-law continuation below the table
        out[low] = np.exp(table.log_g[0] + table.slope0 * (np.log(m[low]) - table.log_m[0]))
    if np.any(mid):
        out[mid] = np.exp(table.spline(np.log(m[mid])))
    if np.any(high):
        log.warning("G evaluated beyond the table (m = %.3g); falling back to direct quadrature", m[high].max())
        base = float(np.exp(table.log_g[-1]))
        out[high] = [base + _quad_half_f(table.m_max, float(v), p) for v in m[high]]
    return float(out[0]) if scalar else out


# F of the rescaled equation (ε = 1)

def nonlinearity(m: npt.ArrayLike, params: ModelParams) -> ArrayLike:
    return f_eps(m, params, eps=1.0)


def nonlinearity_prime(m: npt.ArrayLike, params: ModelParams) -> ArrayLike:
    return f_eps_prime(m, params, eps=1.0)


def nonlinearity_antiderivative(m: npt.ArrayLike, params: ModelParams) -> ArrayLike:
    return g_antiderivative(m, params, eps=1.0)


# --- bump potential -------------------------------------------------------------

def bump_v(x: npt.ArrayLike, v0: float = 1.0) -> ArrayLike:
    """V(x) = v0 exp(1 - 1/(1 - |x|²)) on the unit ball; points carry the last axis."""
    x = np.asarray(x, dtype=float)
    s = 1.0 - np.sum(x**2, axis=-1)
    out = np.zeros_like(s)
    inside = s > 0
    out[inside] = v0 * np.exp(1.0 - 1.0 / s[inside])
    return float(out) if out.ndim == 0 else out


def grad_bump_v(x: npt.ArrayLike, v0: float = 1.0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    s = 1.0 - np.sum(x**2, axis=-1)
    v = np.asarray(bump_v(x, v0))
    factor = np.zeros_like(s)
    inside = s > 0
    factor[inside] = -2.0 * v[inside] / s[inside] ** 2
    return factor[..., None] * x


def v_eps(x: npt.ArrayLike, params: ModelParams) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    return params.eps**2 * bump_v(params.eps * x, params.v0)


def grad_v_eps(x: npt.ArrayLike, params: ModelParams) -> np.ndarray:
    """∇V_ε(x) = ε³ (∇V)(εx)."""
    x = np.asarray(x, dtype=float)
    return params.eps**3 * grad_bump_v(params.eps * x, params.v0)


def potential_field(grid: Grid, params: ModelParams, enabled: bool = True) -> np.ndarray:
    """V_ε sampled on the grid (zero when the potential is switched off)."""
    if not enabled:
        return np.zeros(grid.shape)
    return np.asarray(v_eps(grid.points, params))


def potential_lq_norm(params: ModelParams, q: float, dim: int = 3) -> float:
    """‖V_ε‖_{L^q(ℝ^d)} by radial quadrature."""
    sphere = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}[dim]
    radius = 1.0 / params.eps

    def integrand(rho: float) -> float:
        point = np.zeros(dim)
        point[0] = rho
        return rho ** (dim - 1) * float(v_eps(point, params)) ** q

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(integrand, 0.0, radius, epsabs=0.0, epsrel=1e-12, limit=200)
        except IntegrationWarning as exc:
            raise QuadratureError(f"potential norm quadrature failed: {exc}") from exc
    return float((sphere * value) ** (1.0 / q))
