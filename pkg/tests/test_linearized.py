import numpy as np
import pytest

from solitonlab.core.grid import spinor
from solitonlab.services.linearized import (MovingFrame, apply_h2, apply_l_minus, apply_l_plus, build_root_space,
                                            conjugate_potential, galilei, galilei_adjoint, jay, moving_soliton,
                                            project_pb, project_pb_time, project_pc, transport_root_space,
                                            v1_eps, v2_static)
from solitonlab.schemas.params import ModelParams
from solitonlab.services.soliton import SolitonParams, make_soliton


def _random_spinor(grid, rng):
    x = grid.coords[0]
    envelope = np.exp(-0.1 * x**2)
    return np.stack([envelope * (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
                     for _ in range(2)])


def _rel(grid, f, ref):
    return grid.l2_norm(f) / grid.l2_norm(ref)


def test_potentials_preserve_spinor_structure(ground1d):
    assert v2_static(ground1d).structure_defect() == 0.0
    assert v1_eps(ground1d.grid, ModelParams(eps=0.2)).structure_defect() == 0.0


def test_scalar_operators_annihilate_symmetry_modes(ground1d):
    grid = ground1d.grid
    phi = ground1d.phi.real
    scale = ground1d.mu * phi
    assert _rel(grid, apply_l_minus(phi, ground1d), scale) < 1e-6
    dphi = grid.gradient(phi)[0].real
    assert _rel(grid, apply_l_plus(dphi, ground1d), dphi) < 1e-6
    assert np.allclose(apply_l_plus(ground1d.dmu_phi.real, ground1d), -phi, atol=1e-3)


def test_root_vectors_form_jordan_chain(ground1d):
    grid = ground1d.grid
    root = build_root_space(ground1d)
    eta1, eta2 = root.etas[0], root.etas[1]
    assert _rel(grid, apply_h2(root.sigma, eta1, ground1d), eta1) < 1e-6
    assert _rel(grid, apply_h2(root.sigma, eta2, ground1d) - 1j * eta1, eta1) < 1e-3


def test_root_vectors_follow_the_soliton(ground1d):
    grid = ground1d.grid
    sigma = SolitonParams(a=[1.37], v=[0.4], gamma=0.9, mu=1.0)
    root = build_root_space(ground1d, sigma)
    for eta in root.etas[:1] + root.etas[2:3]:
        assert _rel(grid, apply_h2(sigma, eta, ground1d), eta) < 1e-6


def test_pairings_are_nonzero(ground1d):
    root = build_root_space(ground1d)
    assert len(root.pairs) == 4
    assert abs(root.n1) > 0
    assert set(root.normalizations()) == {"n1", "n3"}


def test_projectors_are_complementary_and_idempotent(ground1d, rng):
    grid = ground1d.grid
    root = build_root_space(ground1d)
    z = _random_spinor(grid, rng)
    pb = project_pb(z, root)
    assert _rel(grid, project_pb(pb, root) - pb, pb) < 1e-10
    assert np.allclose(pb + project_pc(z, root), z)
    for eta in root.etas:
        assert _rel(grid, project_pb(eta, root) - eta, eta) < 1e-10


def test_galilei_transform_is_unitary(grid1d, rng):
    z = _random_spinor(grid1d, rng)
    b = galilei(0.7, [1.234], [0.3], z, grid1d)
    assert np.linalg.norm(b) == pytest.approx(np.linalg.norm(z), rel=1e-12)
    assert np.allclose(galilei_adjoint(0.7, [1.234], [0.3], b, grid1d), z, atol=1e-12)


def test_conjugated_potential_matches_operator_sandwich(ground1d, rng):
    grid = ground1d.grid
    pot = v2_static(ground1d)
    y = [10 * grid.spacing[0]]
    z = _random_spinor(grid, rng)
    direct = galilei(0.4, y, [0.25], pot.apply(galilei_adjoint(0.4, y, [0.25], z, grid)), grid)
    assert np.allclose(conjugate_potential(pot, 0.4, y, [0.25], grid).apply(z), direct, atol=1e-12)


def test_jay_squares_to_minus_one(grid1d, rng):
    z = _random_spinor(grid1d, rng)
    assert np.array_equal(jay(jay(z)), -z)


def test_frozen_frame_moves_freely(ground1d):
    s0 = SolitonParams(a=[-2.0], v=[0.5], gamma=0.3, mu=1.0)
    frame = MovingFrame.frozen(s0)
    beta, b, v = frame.transform(2.0)
    assert beta == pytest.approx(0.3 + 2.0 * (1.0 - 0.125))
    assert b.tolist() == pytest.approx([-1.0])
    expected = make_soliton(SolitonParams(a=b, v=v, gamma=beta, mu=1.0), ground1d)
    assert np.allclose(moving_soliton(frame, ground1d, 2.0), expected)


def test_path_frame_with_constant_parameters_is_frozen():
    s0 = SolitonParams(a=[0.0], v=[0.5], gamma=0.0, mu=1.0)
    times = np.linspace(0.0, 4.0, 41)
    frame = MovingFrame.from_path(s0, times, np.full((41, 1), 0.5), np.ones(41))
    assert np.allclose(frame.beta, 0.0)
    assert np.allclose(frame.y, 0.0)


def test_path_frame_accumulates_velocity_changes():
    s0 = SolitonParams(a=[0.0], v=[0.0], gamma=0.0, mu=1.0)
    times = np.linspace(0.0, 2.0, 201)
    frame = MovingFrame.from_path(s0, times, np.full((201, 1), 0.1), np.ones(201))
    assert frame.y_at(2.0)[0] == pytest.approx(0.2)
    assert frame.beta_at(2.0) == pytest.approx(-0.01)


def test_transported_projector_stays_idempotent(ground1d, rng):
    grid = ground1d.grid
    root0 = build_root_space(ground1d)
    frame = MovingFrame.frozen(SolitonParams(a=[-1.0], v=[0.3], gamma=0.0, mu=1.0))
    moved = transport_root_space(root0, frame, 1.5)
    assert moved.pairs == root0.pairs
    z = _random_spinor(grid, rng)
    pb = project_pb_time(1.5, frame, root0, z)
    assert _rel(grid, project_pb_time(1.5, frame, root0, pb) - pb, pb) < 1e-10


def test_transport_requires_centred_root_space(ground1d):
    root = build_root_space(ground1d, SolitonParams(a=[1.0], v=[0.0], gamma=0.0, mu=1.0))
    with pytest.raises(ValueError):
        transport_root_space(root, MovingFrame.frozen(root.sigma), 0.0)


def test_spinor_helper_stacks_components(grid1d):
    up = np.ones(grid1d.shape)
    assert spinor(up, -up).shape == (2, *grid1d.shape)
