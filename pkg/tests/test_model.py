import numpy as np
import pytest
from pydantic import ValidationError

from solitonlab.schemas.params import ModelParams
from solitonlab.services.model import (bump_v, f_eps, f_eps_prime, g_antiderivative, grad_bump_v,
                                       grad_v_eps, nonlinearity, potential_field, potential_lq_norm, v_eps)


@pytest.mark.parametrize("field, value, constraint", [
    ("p", 1.5, "1 < p < 4/3"),
    ("p", 1.0, "1 < p < 4/3"),
    ("theta", 0.0, "theta > 0"),
    ("eps", 1.5, "0 < eps <= 1"),
])
def test_parameter_constraints_are_named(field, value, constraint):
    with pytest.raises(ValidationError, match=constraint.replace("+", r"\+")):
        ModelParams(**{field: value})


def test_degree_constraint():
    with pytest.raises(ValidationError, match="7/3 < r"):
        ModelParams(p=1.1, r=1.1)


def test_f_eps_limits(params):
    assert f_eps(0.0, params) == 0.0
    # saturation: F ~ m^{p/2} for large m
    m = 1e6
    assert f_eps(m, params) / m ** (params.p / 2) == pytest.approx(1.0, rel=1e-3)


def test_f_eps_prime_matches_finite_difference(params):
    m = np.array([0.01, 0.3, 1.0, 4.0])
    h = 1e-6 * m
    fd = (f_eps(m + h, params) - f_eps(m - h, params)) / (2 * h)
    assert np.allclose(f_eps_prime(m, params), fd, rtol=1e-6)


def test_antiderivative_derivative_is_half_f(params):
    m = np.array([1e-3, 0.1, 0.7, 2.5])
    h = 1e-5 * m
    fd = (g_antiderivative(m + h, params) - g_antiderivative(m - h, params)) / (2 * h)
    assert np.allclose(fd, 0.5 * f_eps(m, params), rtol=1e-4)


def test_antiderivative_at_zero(params):
    assert g_antiderivative(0.0, params) == 0.0


def test_saturation_strengthens_as_eps_shrinks(params):
    assert f_eps(0.5, params, eps=0.1) < f_eps(0.5, params, eps=1.0)
    assert nonlinearity(0.5, params.with_eps(0.1)) == nonlinearity(0.5, params)


def test_bump_profile():
    assert bump_v(np.zeros(3)) == pytest.approx(1.0)
    assert bump_v(np.array([1.0, 0.0, 0.0])) == 0.0
    assert bump_v(np.array([0.5, 0.0, 0.0]), v0=2.0) == pytest.approx(2.0 * np.exp(1 - 1 / 0.75))


def test_bump_gradient_matches_finite_difference():
    x = np.array([0.3, -0.2, 0.1])
    h = 1e-6
    fd = [(bump_v(x + h * e) - bump_v(x - h * e)) / (2 * h) for e in np.eye(3)]
    assert np.allclose(grad_bump_v(x), fd, rtol=1e-6)


def test_scaled_potential(params):
    p = params.with_eps(0.1)
    x = np.array([3.0, 0.0, 0.0])
    assert v_eps(x, p) == pytest.approx(0.01 * bump_v(np.array([0.3, 0.0, 0.0])))
    assert np.allclose(grad_v_eps(x, p), 1e-3 * grad_bump_v(np.array([0.3, 0.0, 0.0])))


def test_potential_field_switch(grid1d, params):
    assert not np.any(potential_field(grid1d, params, enabled=False))
    assert potential_field(grid1d, params).max() == pytest.approx(1.0)


def test_potential_norm_scaling(params):
    # ‖V_ε‖_q = ε^{2 - 3/q} ‖V‖_q in three dimensions
    base = potential_lq_norm(params, 2.0)
    assert potential_lq_norm(params.with_eps(0.5), 2.0) == pytest.approx(0.5 ** 0.5 * base, rel=1e-8)
