from pathlib import Path

import pytest
from pydantic import ValidationError

from solitonlab.core.errors import ConfigurationError
from solitonlab.core.grid import make_grid
from solitonlab.schemas.run_config import RunConfig, load_run_config, parse_run_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_parse_example(config_text):
    cfg = parse_run_config(config_text)
    assert cfg.model.eps == 0.2
    assert cfg.grid.points_per_axis == 512
    assert cfg.sigma0.a_bar == [-0.5]
    assert cfg.scenario.with_potential is False
    assert cfg.horizon_for(0.2) == 1.0
    assert cfg.eps_values() == [0.2]
    cfg.check_resolvable()


def test_defaults_without_file():
    cfg = load_run_config(None)
    assert cfg == RunConfig()
    assert cfg.scenario.horizon == "scaled"
    assert cfg.horizon_for(0.1) == pytest.approx(300.0)


def test_comma_separated_lists(config_text):
    cfg = parse_run_config(config_text + "\n[sweep]\neps = 0.2, 0.4\njobs = 2\n")
    assert cfg.sweep.eps == [0.2, 0.4]
    assert cfg.eps_values() == [0.2, 0.4]


def test_unknown_key_is_rejected(config_text):
    with pytest.raises(ValidationError, match="bogus"):
        parse_run_config(config_text.replace("[model]", "[model]\nbogus = 1"))


def test_unknown_section_is_rejected(config_text):
    with pytest.raises(ConfigurationError, match="unknown section"):
        parse_run_config(config_text + "\n[plots]\nstyle = dark\n")


def test_constraint_message_names_the_constraint(config_text):
    with pytest.raises(ValidationError, match="1 < p < 4/3"):
        parse_run_config(config_text.replace("p = 1.2", "p = 1.5"))


def test_delta_range_for_scaled_horizon(config_text):
    text = config_text.replace("horizon = fixed", "horizon = scaled\ndelta = 3.5")
    with pytest.raises(ValidationError, match="2 <= delta <= 3"):
        parse_run_config(text)


def test_sweep_eps_range(config_text):
    with pytest.raises(ValidationError, match="0 < eps <= 1"):
        parse_run_config(config_text + "\n[sweep]\neps = 0.2, 1.5\n")


def test_box_too_small_for_sweep(config_text):
    with pytest.raises(ValidationError, match="box_length"):
        parse_run_config(config_text + "\n[sweep]\neps = 0.05\n")


def test_box_check_for_single_eps(config_text):
    cfg = parse_run_config(config_text.replace("eps = 0.2", "eps = 0.04"))
    with pytest.raises(ConfigurationError, match="box_length"):
        cfg.check_resolvable()


def test_potential_resolution_check(config_text):
    text = config_text.replace("with_potential = false", "with_potential = true")
    text = text.replace("points_per_axis = 512", "points_per_axis = 8")
    cfg = parse_run_config(text)
    assert any("grid spacings" in p for p in cfg.resolution_problems())


def test_hash_is_stable_and_sensitive(config_text):
    a = parse_run_config(config_text)
    b = parse_run_config(config_text)
    c = parse_run_config(config_text.replace("dt = 0.01", "dt = 0.005"))
    assert a.config_hash() == b.config_hash()
    assert len(a.config_hash()) == 64
    assert a.config_hash() != c.config_hash()


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_run_config(tmp_path / "missing.cfg")


def test_load_from_file(tmp_path, config_text):
    path = tmp_path / "run.cfg"
    path.write_text(config_text)
    assert load_run_config(path) == parse_run_config(config_text)


def test_grid_points_must_be_a_power_of_two(config_text):
    with pytest.raises(ValidationError, match=r"2\^k"):
        parse_run_config(config_text.replace("points_per_axis = 512", "points_per_axis = 48", 1))


def test_default_grid_is_a_power_of_two():
    n = RunConfig().grid.points_per_axis
    assert n >= 8 and n & (n - 1) == 0


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.cfg")), ids=lambda p: p.name)
def test_shipped_configs_load(path):
    cfg = load_run_config(path)
    grid = make_grid(cfg.grid.dim, cfg.grid.points_per_axis, cfg.grid.box_length)
    assert grid.points_per_axis & (grid.points_per_axis - 1) == 0
    assert cfg.model.theta == 0.1


def test_ground_config_resolves_the_core():
    cfg = load_run_config(CONFIGS / "ground.cfg")
    assert (cfg.grid.dim, cfg.grid.points_per_axis, cfg.grid.box_length) == (3, 128, 10.0)
