import numpy as np
import pytest

from solitonlab.core.errors import UnderResolved
from solitonlab.core.grid import make_grid
from solitonlab.schemas.params import GroundStateOptions
from solitonlab.services.ground_state import (check_resolution, energy_functional, equation_residual,
                                              half_max_radius, lyapunov_gap, mass_curve, radial_defect,
                                              solve_ground_state)
from solitonlab.services.soliton import project_off_manifold


def test_residual_and_positivity(ground1d):
    assert ground1d.residual <= 1e-8
    phi = ground1d.phi.real
    assert np.all(phi > -1e-12)
    assert np.argmax(phi) == ground1d.grid.points_per_axis // 2
    assert np.max(np.abs(ground1d.phi.imag)) == 0.0


def test_profile_is_even(ground1d):
    phi = ground1d.phi.real
    # x_j ↦ -x_j maps index j to N - j
    assert np.allclose(phi[1:], phi[1:][::-1], atol=1e-10)


def test_convexity_and_mass_derivative(ground1d):
    assert ground1d.convexity > 0
    assert ground1d.mass_derivative_at(1.0) == pytest.approx(2 * ground1d.convexity)


def test_dmu_phi_predicts_nearby_profile(ground1d, grid1d, params):
    other = solve_ground_state(1.05, grid1d, params, with_derivative=False)
    predicted = ground1d.profile(1.05)
    assert grid1d.l2_norm(predicted - other.phi) / grid1d.l2_norm(other.phi) < 1e-4


def test_ground_state_is_critical_point_of_energy(ground1d, rng):
    grid = ground1d.grid
    x = grid.coords[0]
    bump = np.exp(-x**2) * (1 + 0.3 * x)
    h = 1e-4
    e_plus = energy_functional(ground1d.phi + h * bump, 1.0, grid, ground1d.params)
    e_minus = energy_functional(ground1d.phi - h * bump, 1.0, grid, ground1d.params)
    derivative = (e_plus - e_minus) / (2 * h)
    assert abs(derivative) < 1e-6


def test_lyapunov_gap_is_quadratic(ground1d):
    grid = ground1d.grid
    x = grid.coords[0]
    zeta = project_off_manifold(np.exp(-x**2 / 2) * (1 + 0.5j * x**2), ground1d)
    g1 = lyapunov_gap(1e-3 * zeta, ground1d.phi, 1.0, grid, ground1d.params)
    g2 = lyapunov_gap(2e-3 * zeta, ground1d.phi, 1.0, grid, ground1d.params)
    assert g1 > 0
    assert g2 / g1 == pytest.approx(4.0, rel=0.05)


def test_equation_residual_detects_wrong_frequency(ground1d):
    assert equation_residual(ground1d.phi, 1.1, ground1d.grid, ground1d.params) > 1e-3


def test_under_resolved_soliton_is_rejected():
    grid = make_grid(1, 16, 40.0)
    x = grid.coords[0]
    with pytest.raises(UnderResolved, match="grid points across"):
        check_resolution(np.exp(-x**2), grid, GroundStateOptions())


def test_coarse_grid_is_rejected_and_fine_grid_accepted(grid1d):
    coarse = make_grid(1, 128, 40.0)
    with pytest.raises(UnderResolved):
        check_resolution(1 / np.cosh(coarse.coords[0]), coarse, GroundStateOptions())
    profile = 1 / np.cosh(grid1d.coords[0])
    assert half_max_radius(profile, grid1d) == pytest.approx(np.arccosh(2.0), abs=2e-3)
    check_resolution(profile, grid1d, GroundStateOptions())


def test_ground_state_is_radially_non_increasing(ground1d):
    assert ground1d.radial_defect < 1e-8
    assert radial_defect(ground1d.phi, ground1d.grid) == ground1d.radial_defect


def test_radial_defect_flags_a_bump(grid2d):
    r = grid2d.radius()
    bumpy = np.exp(-r**2) + 0.8 * np.exp(-(r - 5.0)**2)
    assert radial_defect(bumpy, grid2d) > 0.1
    assert radial_defect(np.exp(-r**2), grid2d) == 0.0


def test_invalid_frequency(grid1d, params):
    with pytest.raises(ValueError):
        solve_ground_state(-1.0, grid1d, params)


def test_mass_curve_records_rows(grid1d, params):
    rows = mass_curve([0.8, 1.2], grid1d, params)
    assert [r["converged"] for r in rows] == [True, True]
    assert rows[0]["mass"] < rows[1]["mass"]
    assert all(r["convexity"] > 0 for r in rows)


@pytest.mark.slow
def test_three_dimensional_ground_state(params):
    grid = make_grid(3, 128, 10.0)
    ground = solve_ground_state(1.0, grid, params)
    assert ground.residual <= 1e-8
    assert ground.convexity > 0
