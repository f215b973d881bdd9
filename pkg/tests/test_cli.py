import json

import pytest

from solitonlab.main import EXIT_ACCEPTANCE, EXIT_OK, EXIT_VALIDATION, main


@pytest.fixture
def config_file(tmp_path, config_text):
    path = tmp_path / "run.cfg"
    path.write_text(config_text)
    return path


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "solitonlab" in capsys.readouterr().out


def test_ground_writes_report(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["ground", "--config", str(config_file), "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "ground.json").read_text())
    assert report["ground_state"]["mu"] == 1.0
    assert report["ground_state"]["residual"] < 1e-8
    assert len(report["meta"]["config_hash"]) == 64
    assert report["ground_state"]["radial_defect"] < 1e-8
    assert "convexity" in capsys.readouterr().out


def test_invalid_parameters_exit_with_validation_code(tmp_path, config_text):
    path = tmp_path / "bad.cfg"
    path.write_text(config_text.replace("p = 1.2", "p = 1.5"))
    assert main(["ground", "--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_VALIDATION


def test_non_power_of_two_grid_exits_with_validation_code(tmp_path, config_text):
    path = tmp_path / "bad.cfg"
    path.write_text(config_text.replace("points_per_axis = 512", "points_per_axis = 48"))
    assert main(["ground", "--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_VALIDATION


def test_missing_config_file(tmp_path):
    assert main(["ground", "--config", str(tmp_path / "nope.cfg")]) == EXIT_VALIDATION


def test_threads_must_be_positive(config_file, tmp_path):
    assert main(["ground", "--config", str(config_file), "--out", str(tmp_path), "--threads", "0"]) == EXIT_VALIDATION


def test_failed_verify_check_exits_with_acceptance_code(tmp_path, config_text):
    path = tmp_path / "verify.cfg"
    path.write_text(config_text + "\n[verify]\npoints_per_axis = 512\nsamples = 1\nsteps = 10\ngrid_roundtrip = -1\n")
    out = tmp_path / "out"
    assert main(["verify", "--config", str(path), "--out", str(out)]) == EXIT_ACCEPTANCE
    report = json.loads((out / "verify.json").read_text())
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    assert "grid_roundtrip" in failed


def test_interact_is_reproducible(config_file, tmp_path):
    for run in ("a", "b"):
        assert main(["interact", "--config", str(config_file), "--out", str(tmp_path / run), "--seed", "3"]) == EXIT_OK
    for name in ("finite_time_eps0.2.csv", "finite_time_summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_evolve_then_resume(config_file, tmp_path):
    first = tmp_path / "first"
    assert main(["evolve", "--config", str(config_file), "--out", str(first), "--t-end", "0.5"]) == EXIT_OK
    checkpoint = first / "evolve_final.nlss"
    second = tmp_path / "second"
    assert main(["evolve", "--config", str(config_file), "--out", str(second),
                 "--resume", str(checkpoint), "--t-end", "1.0"]) == EXIT_OK
    summary = json.loads((second / "evolve.json").read_text())["summary"]
    assert summary["t0"] == pytest.approx(0.5)
    assert summary["steps"] == 50
    assert summary["mass_drift"] < 1e-12
