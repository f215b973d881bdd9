import numpy as np
import pytest

from solitonlab.core.errors import ConfigurationError, NonFinite
from solitonlab.core.grid import Grid, ensure_finite, make_grid, spinor, wavenumbers


@pytest.mark.parametrize("n, box", [(12, 10.0), (4, 10.0), (16, -1.0)])
def test_invalid_grids_are_rejected(n, box):
    with pytest.raises(ConfigurationError):
        make_grid(1, n, box)


@pytest.mark.parametrize("n", [64.5, True, "64"])
def test_non_integer_point_counts_are_rejected(n):
    with pytest.raises(ConfigurationError, match="integer"):
        make_grid(1, n, 10.0)


def test_integral_float_point_count_is_accepted():
    assert make_grid(1, 64.0, 10.0).points_per_axis == 64


def test_dimension_must_be_1_2_or_3():
    with pytest.raises(ConfigurationError):
        Grid(dim=4, points_per_axis=8, box_length=(1.0,) * 4)


def test_wavenumbers_follow_dft_order():
    k = wavenumbers(8, 2 * np.pi)
    assert np.allclose(k, [0, 1, 2, 3, -4, -3, -2, -1])


def test_coordinates_are_centred(grid1d):
    x = grid1d.coords[0]
    assert x[0] == pytest.approx(-20.0)
    assert x[grid1d.points_per_axis // 2] == pytest.approx(0.0)
    assert grid1d.volume == pytest.approx(40.0)


def test_spectral_laplacian_is_exact_on_fourier_modes(grid2d):
    x, y = grid2d.coords
    k1 = 2 * np.pi * 3 / 24.0
    k2 = 2 * np.pi * 2 / 24.0
    f = np.sin(k1 * x) * np.cos(k2 * y)
    assert np.allclose(grid2d.laplacian(f).real, -(k1**2 + k2**2) * f, atol=1e-10)


def test_gradient_of_gaussian(grid1d):
    x = grid1d.coords[0]
    f = np.exp(-x**2)
    (g,) = grid1d.gradient(f)
    assert np.allclose(g.real, -2 * x * f, atol=1e-10)


def test_grid_aligned_shift_is_a_roll(grid1d, rng):
    f = rng.standard_normal(grid1d.shape)
    shifted = grid1d.shift(f, [3 * grid1d.spacing[0]])
    assert np.array_equal(shifted, np.roll(f, 3))


def test_fractional_shift_of_band_limited_field(grid1d):
    x = grid1d.coords[0]
    f = np.exp(-x**2 / 4)
    shifted = grid1d.shift(f, [0.37])
    assert np.allclose(shifted.real, np.exp(-(x - 0.37) ** 2 / 4), atol=1e-10)


def test_norms_of_constant_field(grid1d):
    f = np.full(grid1d.shape, 2.0 + 0j)
    assert grid1d.l2_norm(f) == pytest.approx(2.0 * np.sqrt(40.0))
    assert grid1d.lq_norm(f, 6.0) == pytest.approx(2.0 * 40.0 ** (1 / 6))
    assert grid1d.h1_norm(f) == pytest.approx(grid1d.l2_norm(f))
    assert grid1d.linf_norm(f) == 2.0


def test_spinor_norm_uses_pointwise_modulus(grid1d, rng):
    u = rng.standard_normal(grid1d.shape) + 1j * rng.standard_normal(grid1d.shape)
    z = spinor(u, np.conj(u))
    assert grid1d.l2_norm(z) == pytest.approx(np.sqrt(2) * grid1d.l2_norm(u))
    assert grid1d.lq_norm(z, 6.0) == pytest.approx(np.sqrt(2) * grid1d.lq_norm(u, 6.0))


def test_inner_is_linear_in_first_slot(grid1d, rng):
    f = rng.standard_normal(grid1d.shape) + 1j * rng.standard_normal(grid1d.shape)
    g = rng.standard_normal(grid1d.shape) + 1j * rng.standard_normal(grid1d.shape)
    assert grid1d.inner(1j * f, g) == pytest.approx(1j * grid1d.inner(f, g))
    assert grid1d.inner(f, f).real == pytest.approx(grid1d.l2_norm(f) ** 2)


def test_boundary_ratio_of_gaussian_is_tiny(grid1d):
    x = grid1d.coords[0]
    assert grid1d.boundary_ratio(np.exp(-x**2)) < 1e-100


def test_ensure_finite_raises():
    with pytest.raises(NonFinite):
        ensure_finite(np.array([1.0, np.nan]))
