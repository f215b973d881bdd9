import numpy as np
import pytest

from solitonlab.core.errors import SeparationViolated
from solitonlab.schemas.run_config import parse_run_config
from solitonlab.services.experiments import (fit_loglog, guess_sigma, initial_z, modulation_defect_rates,
                                             run_charge_transfer_uniformity, run_finite_time, run_post_interaction,
                                             run_sweep, separation_margin, synthetic_radiation)
from solitonlab.services.soliton import SolitonParams, frame_vectors, group_action_inverse, make_soliton, \
    symplectic_form
from solitonlab.storage.emitters import read_csv


@pytest.fixture
def cfg(config_text):
    return parse_run_config(config_text)


def test_fit_recovers_power_law():
    eps = [0.2, 0.1, 0.05]
    fit = fit_loglog(eps, [3.0 * e**2 for e in eps], expected=2.0)
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(np.log(3.0))
    assert fit.half_width == pytest.approx(0.0, abs=1e-8)
    assert fit.points == 3


def test_fit_needs_two_points():
    assert fit_loglog([0.1], [1.0]) is None
    assert np.isnan(fit_loglog([0.1, 0.2], [1.0, 2.0]).half_width)


def test_free_path_has_no_modulation_defect():
    times = np.linspace(0.0, 2.0, 21)
    v, mu = np.array([0.3]), 1.0
    sigmas = [SolitonParams(a=-1.0 + v * t, v=v, gamma=0.2 + (mu - 0.045) * t, mu=mu) for t in times]
    assert np.max(modulation_defect_rates(times, sigmas)) < 1e-12


def test_separation_margin():
    s = SolitonParams(a=[10.0], v=[1.0], gamma=0.0, mu=1.0)
    margin = separation_margin(s, 0.5, np.array([0.0, 2.0]), 1.0, 0.5)
    assert margin.tolist() == pytest.approx([8.0, 9.5])


def test_guess_sigma_locates_the_soliton(ground1d):
    s = SolitonParams(a=[2.5], v=[0.3], gamma=0.4, mu=1.0)
    guess = guess_sigma(make_soliton(s, ground1d), ground1d.grid, 1.0)
    assert guess.a[0] == pytest.approx(2.5, abs=ground1d.grid.spacing[0])
    assert guess.v[0] == pytest.approx(0.3, rel=1e-8)


def test_synthetic_radiation_is_skew_orthogonal(ground1d):
    grid = ground1d.grid
    s = SolitonParams(a=[1.0], v=[0.2], gamma=0.5, mu=1.0)
    r = synthetic_radiation(s, ground1d, 0.01, seed=3)
    assert grid.h1_norm(r) == pytest.approx(0.01)
    frame_r = group_action_inverse(r, s.a, s.v, s.gamma, grid)
    zs = frame_vectors(ground1d.phi, ground1d.dmu_phi, grid)
    assert max(abs(symplectic_form(frame_r, z, grid)) for z in zs) < 1e-12
    assert not np.any(synthetic_radiation(s, ground1d, 0.0, seed=3))


def test_initial_z_is_conjugate_pair(grid1d):
    z = initial_z(grid1d, 1e-3, seed=5)
    assert np.array_equal(z[1], np.conj(z[0]))
    assert grid1d.l2_norm(z[0]) == pytest.approx(1e-3)


def test_free_soliton_stays_on_the_manifold(cfg, ground1d, tmp_path):
    report = run_finite_time(cfg, out_dir=tmp_path, ground=ground1d)
    (member,) = report.members
    assert member.status == "ok"
    assert member.steps == 100
    assert member.mass_drift < 1e-12
    assert member.r_h1_final < 1e-3
    assert member.max_position_deviation < 1e-3
    assert member.sigma_final.a[0] == pytest.approx(-2.3, abs=1e-3)
    assert report.fit is None
    header, data = read_csv(member.csv_path)
    assert header[:2] == ["t", "a1"]
    assert data.shape[0] == 11


def test_inward_start_violates_separation(cfg, ground1d):
    with pytest.raises(SeparationViolated):
        run_post_interaction(cfg, ground=ground1d)


def test_outgoing_soliton_scatters_trivially(config_text, ground1d, tmp_path):
    cfg = parse_run_config(config_text.replace("a_bar = -0.5", "a_bar = 1.5"))
    report = run_post_interaction(cfg, out_dir=tmp_path, ground=ground1d)
    assert len(report.samples) == 6
    assert report.samples[-1].metric < 1e-12
    assert report.sigma_dot_l1 < 1e-2
    assert report.min_separation_margin > 0
    assert report.sigma_plus.v[0] == pytest.approx(0.2, abs=1e-4)
    assert (tmp_path / "u_plus_eps0.2.nlss").exists()


def test_uniformity_without_potentials_is_exactly_uniform(config_text, ground1d):
    text = config_text.replace("with_potential = false",
                               "with_potential = false\nwith_v1 = false\nwith_v2 = false\nz_horizon = 0.5\nz_dt = 0.01")
    cfg = parse_run_config(text + "\n[sweep]\neps = 0.2, 0.1\n")
    report = run_charge_transfer_uniformity(cfg, seed=7, ground=ground1d)
    assert report.spread == 1.0
    for member in report.members:
        assert member.symmetry_defect < 1e-12
        assert member.ratio == pytest.approx(member.free_l6_l2t / member.z0_l2, rel=1e-8)


def test_unknown_sweep_scenario(cfg):
    with pytest.raises(ValueError, match="unknown scenario"):
        run_sweep(cfg, "bogus")
