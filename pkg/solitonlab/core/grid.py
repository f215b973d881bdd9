"""Periodic tensor grids, spectral operators and discrete norms.

Fields are plain numpy arrays: a scalar field has shape ``grid.shape`` and a
spinor field has shape ``(2, *grid.shape)`` (upper, lower). Every transform
acts on the trailing ``dim`` axes, so the same helpers serve both.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import numpy.typing as npt
import scipy.fft

from .errors import ConfigurationError, NonFinite

ComplexField = npt.NDArray[np.complex128]
SpinorField = npt.NDArray[np.complex128]
RealField = npt.NDArray[np.float64]


def wavenumbers(n: int, length: float) -> npt.NDArray[np.float64]:
    """Angular wavenumbers in standard DFT order, 2π/length per index."""
    return 2.0 * np.pi * scipy.fft.fftfreq(n, d=length / n)


@dataclass(frozen=True)
class FieldNorms:
    l2: float
    lq: float
    q: float
    h1: float
    linf: float


@dataclass(frozen=True)
class Grid:
    dim: int
    points_per_axis: int
    box_length: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise ConfigurationError(f"grid dimension must be 1, 2 or 3, got {self.dim}")
        n = self.points_per_axis
        if n < 8 or n & (n - 1):
            raise ConfigurationError(f"points_per_axis must be a power of two >= 8, got {n}")
        if len(self.box_length) != self.dim:
            raise ConfigurationError("box_length needs one entry per axis")
        if any(not np.isfinite(L) or L <= 0 for L in self.box_length):
            raise ConfigurationError(f"box_length must be positive, got {self.box_length}")

    # --- geometry ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.dim

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(range(-self.dim, 0))

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / self.points_per_axis for L in self.box_length)

    @cached_property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @cached_property
    def volume(self) -> float:
        return float(np.prod(self.box_length))

    @cached_property
    def axis_coordinates(self) -> tuple[npt.NDArray[np.float64], ...]:
        # box centred on the origin; the origin is a grid point
        return tuple(-L / 2 + h * np.arange(self.points_per_axis)
                     for L, h in zip(self.box_length, self.spacing))

    @cached_property
    def coords(self) -> tuple[npt.NDArray[np.float64], ...]:
        """Broadcastable (sparse) coordinate arrays x_1..x_d."""
        return tuple(np.meshgrid(*self.axis_coordinates, indexing="ij", sparse=True))

    @cached_property
    def points(self) -> npt.NDArray[np.float64]:
        """Dense array of points with shape (*shape, dim)."""
        return np.stack(np.meshgrid(*self.axis_coordinates, indexing="ij"), axis=-1)

    @cached_property
    def wavenumbers(self) -> tuple[npt.NDArray[np.float64], ...]:
        return tuple(wavenumbers(self.points_per_axis, L) for L in self.box_length)

    @cached_property
    def k_vectors(self) -> tuple[npt.NDArray[np.float64], ...]:
        return tuple(np.meshgrid(*self.wavenumbers, indexing="ij", sparse=True))

    @cached_property
    def k2(self) -> npt.NDArray[np.float64]:
        k2 = np.zeros(self.shape)
        for k in self.k_vectors:
            k2 = k2 + k**2
        return k2

    @property
    def k2_max(self) -> float:
        return float(self.k2.max())

    def radius(self, center: Sequence[float] | None = None) -> RealField:
        """|x - center| with periodic (minimum image) distances."""
        c = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        r2 = np.zeros(self.shape)
        for x, cj, L in zip(self.coords, c, self.box_length):
            d = x - cj
            d = d - L * np.round(d / L)
            r2 = r2 + d**2
        return np.sqrt(r2)

    def wrap(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Map points (..., dim) into the fundamental box [-L/2, L/2)."""
        p = np.asarray(points, dtype=float)
        L = np.asarray(self.box_length)
        return (p + L / 2) % L - L / 2

    def describe(self) -> dict:
        return {"dim": self.dim, "points_per_axis": self.points_per_axis,
                "box_length": list(self.box_length), "spacing": list(self.spacing)}

    # --- transforms -------------------------------------------------------------

    def fft(self, f: np.ndarray) -> ComplexField:
        return scipy.fft.fftn(f, axes=self.axes)

    def ifft(self, f_hat: np.ndarray) -> ComplexField:
        return scipy.fft.ifftn(f_hat, axes=self.axes)

    def apply_multiplier(self, f: np.ndarray, multiplier: np.ndarray) -> ComplexField:
        return self.ifft(multiplier * self.fft(f))

    def laplacian(self, f: np.ndarray) -> ComplexField:
        """Δf (the -½ factor of the equation is applied by callers)."""
        return self.apply_multiplier(f, -self.k2)

    def gradient(self, f: np.ndarray) -> list[ComplexField]:
        f_hat = self.fft(f)
        return [self.ifft(1j * k * f_hat) for k in self.k_vectors]

    def shift(self, f: np.ndarray, a: Sequence[float]) -> np.ndarray:
        """Translate f by a: returns f(x - a) on the torus.

        Grid-aligned shifts are exact rolls; other shifts use the Fourier phase.
        """
        a = np.asarray(a, dtype=float)
        steps = a / np.asarray(self.spacing)
        if np.all(np.abs(steps - np.round(steps)) < 1e-12):
            ints = tuple(int(s) for s in np.round(steps))
            if not any(ints):
                return f.copy()
            return np.roll(f, ints, axis=self.axes)
        phase = np.ones(self.shape, dtype=complex)
        for k, aj in zip(self.k_vectors, a):
            phase = phase * np.exp(-1j * k * aj)
        return self.ifft(phase * self.fft(f))

    # --- quadrature and norms ---------------------------------------------------

    def integrate(self, f: np.ndarray) -> complex | float:
        return self.cell_volume * np.sum(f)

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Complex inner product Σ∫ f ḡ (summed over spinor components)."""
        return complex(self.cell_volume * np.vdot(g, f))

    def real_inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """The real pairing Re∫ f ḡ."""
        return self.inner(f, g).real

    def l2_norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.cell_volume * np.sum(np.abs(f) ** 2)))

    def lq_norm(self, f: np.ndarray, q: float) -> float:
        """L^q norm; spinors use the pointwise Euclidean modulus."""
        if not 1 <= q < np.inf:
            raise ConfigurationError(f"q must lie in [1, inf), got {q}")
        modulus = self._modulus(f)
        return float((self.cell_volume * np.sum(modulus ** q)) ** (1.0 / q))

    def gradient_l2_squared(self, f: np.ndarray) -> float:
        # Parseval: ∫|∇f|² = (cell/size) Σ |k|² |f̂|²
        f_hat = self.fft(f)
        return float(self.cell_volume / self.size * np.sum(self.k2 * np.abs(f_hat) ** 2))

    def h1_norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.l2_norm(f) ** 2 + self.gradient_l2_squared(f)))

    def w1q_norm(self, f: np.ndarray, q: float) -> float:
        """‖f‖_{L^q} + ‖∇f‖_{L^q} with the spectral gradient."""
        grads = self.gradient(f)
        grad_mod = np.sqrt(sum(np.abs(g) ** 2 for g in grads))
        return self.lq_norm(f, q) + float((self.cell_volume * np.sum(grad_mod ** q)) ** (1.0 / q))

    def linf_norm(self, f: np.ndarray) -> float:
        return float(self._modulus(f).max())

    def norms(self, f: np.ndarray, q: float = 6.0) -> FieldNorms:
        return FieldNorms(l2=self.l2_norm(f), lq=self.lq_norm(f, q), q=q,
                          h1=self.h1_norm(f), linf=self.linf_norm(f))

    def _modulus(self, f: np.ndarray) -> np.ndarray:
        if f.ndim == self.dim + 1:
            return np.sqrt(np.sum(np.abs(f) ** 2, axis=0))
        return np.abs(f)

    # --- diagnostics ------------------------------------------------------------

    def boundary_mask(self, fraction: float = 0.05) -> npt.NDArray[np.bool_]:
        """Points within ``fraction`` of the box length from any face."""
        mask = np.zeros(self.shape, dtype=bool)
        for x, L in zip(self.coords, self.box_length):
            mask = mask | (np.abs(x) >= L / 2 * (1 - 2 * fraction))
        return mask

    def boundary_ratio(self, f: np.ndarray, fraction: float = 0.05) -> float:
        """max |f| on the boundary shell relative to the peak."""
        modulus = self._modulus(f)
        peak = modulus.max()
        if peak == 0:
            return 0.0
        return float(modulus[self.boundary_mask(fraction)].max() / peak)

    def shell_averages(self, f: np.ndarray, nbins: int | None = None) -> npt.NDArray[np.float64]:
        """Averages of |f| over spherical shells about the origin."""
        r = self.radius()
        h = min(self.spacing)
        rmax = min(self.box_length) / 2
        nbins = nbins or int(rmax / h)
        edges = np.linspace(0.0, rmax, nbins + 1)
        idx = np.digitize(r.ravel(), edges) - 1
        valid = (idx >= 0) & (idx < nbins)
        sums = np.bincount(idx[valid], weights=np.abs(f).ravel()[valid], minlength=nbins)
        counts = np.bincount(idx[valid], minlength=nbins)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def _integer(value, name: str) -> int:
    if isinstance(value, (bool, np.bool_)):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)) and float(value).is_integer():
        return int(value)
    raise ConfigurationError(f"{name} must be an integer, got {value!r}")


def make_grid(dim: int, points_per_axis: int, box_length: float | Sequence[float]) -> Grid:
    dim = _integer(dim, "dim")
    points_per_axis = _integer(points_per_axis, "points_per_axis")
    if np.ndim(box_length) == 0:
        lengths = (float(box_length),) * dim
    else:
        lengths = tuple(float(L) for L in box_length)  # type: ignore[union-attr]
    return Grid(dim=dim, points_per_axis=points_per_axis, box_length=lengths)


def spinor(upper: np.ndarray, lower: np.ndarray) -> SpinorField:
    return np.stack([np.asarray(upper, dtype=complex), np.asarray(lower, dtype=complex)])


def ensure_finite(f: np.ndarray, what: str = "field") -> np.ndarray:
    if not np.all(np.isfinite(f)):
        raise NonFinite(f"{what} contains NaN or Inf")
    return f
