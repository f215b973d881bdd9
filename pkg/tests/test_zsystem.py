import numpy as np
import pytest
from scipy.linalg import expm

from solitonlab.core.errors import ConfigurationError
from solitonlab.core.grid import spinor
from solitonlab.schemas.params import ModelParams
from solitonlab.services.linearized import MatrixPotential, v1_eps, v2_static
from solitonlab.services.zsystem import (StrichartzAccumulator, ZSystem, check_admissible, expm_2x2,
                                         free_l6_decay, linear_stability_trace, propagate_z)


def _packet(grid, rng):
    x = grid.coords[0]
    r = np.exp(-0.5 * (x - 1.0) ** 2) * (1 + 0.3 * rng.standard_normal(grid.shape)) * np.exp(0.5j * x)
    return spinor(r, np.conj(r))


def test_closed_form_exponential_matches_scipy(rng):
    entries = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    entries[:, 0] = 0.0
    entries[:, 1] = [0.0, 1.0, 0.0, 0.0]
    entries[:, 2] *= 1e-6
    pot = MatrixPotential(*entries)
    scale = -0.5j * 0.1
    ex = expm_2x2(pot, scale)
    for j in range(entries.shape[1]):
        expected = expm(scale * entries[:, j].reshape(2, 2))
        got = np.array([[ex.v11[j], ex.v12[j]], [ex.v21[j], ex.v22[j]]])
        assert np.allclose(got, expected, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("p, q", [(2.0, 6.0), (np.inf, 2.0), (4.0, 3.0)])
def test_admissible_pairs(p, q):
    check_admissible(p, q)


@pytest.mark.parametrize("p, q", [(2.0, 4.0), (1.0, 6.0), (np.inf, 6.0)])
def test_inadmissible_pairs(p, q):
    with pytest.raises(ConfigurationError):
        check_admissible(p, q)


def test_zero_data_stays_zero(grid1d):
    system = ZSystem(grid1d, 0.01, static=v1_eps(grid1d, ModelParams(eps=0.2)))
    run = propagate_z(np.zeros((2, *grid1d.shape), dtype=complex), system, 0.5)
    assert not np.any(run.z)
    assert run.norms.l2t_l6x == 0.0
    assert run.symmetry_defect == 0.0


def test_free_flow_conserves_l2(grid1d, rng):
    z0 = _packet(grid1d, rng)
    run = propagate_z(z0, ZSystem(grid1d, 0.01), 2.0)
    total = np.sqrt(np.sum(run.l2_trace**2, axis=1))
    assert np.allclose(total, grid1d.l2_norm(z0), rtol=1e-12)
    assert run.times[-1] == pytest.approx(2.0)


def test_free_upper_component_matches_exact_multiplier(grid1d, rng):
    z0 = _packet(grid1d, rng)
    run = propagate_z(z0, ZSystem(grid1d, 0.05), 1.0)
    exact = grid1d.ifft(np.exp(-0.5j * grid1d.k2) * grid1d.fft(z0[0]))
    assert np.allclose(run.z[0], exact, atol=1e-12)


def test_potentials_preserve_conjugate_structure(ground1d, rng):
    grid = ground1d.grid
    static = v1_eps(grid, ModelParams(eps=0.2))
    run = propagate_z(_packet(grid, rng), ZSystem(grid, 0.01, static=static, moving=v2_static(ground1d)), 1.0)
    assert run.symmetry_defect < 1e-10


def test_time_dependent_potential_is_evaluated(grid1d, rng):
    calls = []

    def moving(t):
        calls.append(t)
        return MatrixPotential.zeros(grid1d)

    propagate_z(_packet(grid1d, rng), ZSystem(grid1d, 0.1, moving=moving), 0.5)
    assert calls[0] == pytest.approx(0.0)
    assert pytest.approx(0.05) in calls


def test_forcing_drives_zero_data(grid1d):
    x = grid1d.coords[0]
    f = np.exp(-x**2) + 0j
    source = spinor(f, -np.conj(f))
    run = propagate_z(np.zeros((2, *grid1d.shape), dtype=complex),
                      ZSystem(grid1d, 0.01, forcing=lambda t: source), 0.5)
    size = grid1d.l2_norm(run.z)
    assert 0 < size <= 0.5 * grid1d.l2_norm(source) * (1 + 1e-12)
    assert run.norms.forcing_l2t_l65x > 0


def test_free_l6_decay_starts_at_the_data_norm(grid1d, rng):
    z0 = _packet(grid1d, rng)
    decay = free_l6_decay(z0[0], grid1d, [0.0, 1.0, 4.0])
    assert decay[0] == pytest.approx(grid1d.lq_norm(z0[0], 6.0))
    assert decay[2] < decay[0]


def test_accumulator_on_constant_path(grid1d, rng):
    z = _packet(grid1d, rng)
    acc = StrichartzAccumulator(grid1d)
    for t in np.linspace(0.0, 4.0, 9):
        acc.add(t, z)
    norms = acc.result()
    assert norms.horizon == pytest.approx(4.0)
    assert norms.l2t_l6x == pytest.approx(2.0 * grid1d.lq_norm(z, 6.0))
    assert norms.linf_l2 == pytest.approx(grid1d.l2_norm(z))
    assert norms.pairs["Linft_L2x"] == pytest.approx(grid1d.l2_norm(z))
    assert norms.local_decay_v1 == 0.0


def test_invalid_inputs(grid1d):
    with pytest.raises(ConfigurationError):
        ZSystem(grid1d, 0.0)
    with pytest.raises(ConfigurationError):
        propagate_z(np.zeros(grid1d.shape, dtype=complex), ZSystem(grid1d, 0.1), 1.0)


def test_linear_stability_of_continuum_part(ground1d, rng):
    trace = linear_stability_trace(ground1d, _packet(ground1d.grid, rng), 1.0, 0.01)
    assert trace[0] == pytest.approx(1.0)
    assert np.all(np.isfinite(trace))
    assert trace.max() < 10.0
