import numpy as np
import pytest

from solitonlab.services.spectral import embedded_eigenvalue_probe, h2_operator_scale, spectral_probe


@pytest.fixture(scope="module")
def report(ground1d):
    return spectral_probe(ground1d)


def test_l_minus_is_nonnegative_with_phi_in_kernel(report):
    assert abs(report.l_minus_bottom[0]) < 1e-6
    assert report.l_minus_bottom[1] > 1e-3
    assert report.l_minus_phi_residual < 1e-6


def test_l_plus_has_one_negative_direction(report):
    assert report.l_plus_negative_count == 1
    assert any(abs(v) < 1e-6 for v in report.l_plus_near_zero)
    assert max(report.l_plus_translation_residuals) < 1e-6


def test_root_space_has_full_rank(report):
    assert report.root_space_rank_estimate == 4
    assert report.near_kernel_count == 4
    assert max(report.kernel_residuals) < 1e-4
    assert max(report.adjoint_kernel_residuals) < 1e-4
    assert len(report.gram_singular_values) == 4


def test_report_serialises(report, ground1d):
    data = report.to_dict()
    assert data["mu"] == 1.0
    assert data["thresholds"]["h2_scale"] == pytest.approx(h2_operator_scale(ground1d))


def test_embedded_probe_returns_one_entry_per_shift(ground1d):
    probes = embedded_eigenvalue_probe(ground1d, [2.0, -2.0], steps=2)
    assert [p.shift for p in probes] == [2.0, -2.0]
    for p in probes:
        assert 0.0 <= p.localisation <= 1.0
        assert np.isfinite(p.residual)
