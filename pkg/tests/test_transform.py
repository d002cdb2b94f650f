# tests/test_transform.py
import math

import numpy as np
import pytest

from core.errors import ArgumentError, NumericDomainError
from core.transform import (
    ALGEBRAIC,
    MATERN,
    DecaySpec,
    check_admissibility,
    coefficient,
    covariant_pullback,
    deformation_slope,
    jacobian,
    map_point,
    physical_normal,
    pullback_curl,
    surface_jacobian,
    validate_param_point,
)


def unit_vector(J, k):
    e = np.zeros(J)
    e[k] = 1.0
    return e


def test_algebraic_coefficients(algebraic_spec):
    assert coefficient(1, algebraic_spec) == pytest.approx(0.1, rel=1e-15)
    assert coefficient(2, algebraic_spec) == pytest.approx(0.0125, rel=1e-15)


def test_matern_coefficient_matches_gamma_formula():
    spec = DecaySpec(family=MATERN, J=3, theta=0.1, nu=0.5, l=0.1)
    a = 100.0
    expected = 0.1 * a ** 0.5 / (a + math.pi ** 2) ** 1.0 * math.gamma(1.0) / math.gamma(0.5)
    assert coefficient(1, spec) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("spec", [
    DecaySpec(family=ALGEBRAIC, J=30, theta=0.5, r=1.5),
    DecaySpec(family=MATERN, J=30, theta=0.1, nu=2.5, l=0.3),
])
def test_coefficients_positive_and_decreasing(spec):
    mu = spec.coefficients()
    assert np.all(mu > 0)
    assert np.all(np.diff(mu) < 0)


@pytest.mark.parametrize("j", [0, 5, -1])
def test_coefficient_index_out_of_range(algebraic_spec, j):
    with pytest.raises(ArgumentError):
        coefficient(j, algebraic_spec)


@pytest.mark.parametrize("kwargs", [
    dict(family=ALGEBRAIC, J=3, theta=0.1, r=1.0),
    dict(family=ALGEBRAIC, J=3, theta=0.0, r=2.0),
    dict(family=MATERN, J=3, theta=0.1, nu=0.0, l=0.1),
    dict(family=MATERN, J=3, theta=0.1, nu=0.5, l=-1.0),
    dict(family=MATERN, J=0, theta=0.1, nu=0.5, l=0.1),
    dict(family="gaussian", J=3, theta=0.1),
])
def test_invalid_decay_specs(kwargs):
    with pytest.raises(ArgumentError):
        DecaySpec(**kwargs)


def test_underflowing_coefficient_is_a_numeric_domain_error():
    with pytest.raises(NumericDomainError):
        DecaySpec(family=ALGEBRAIC, J=2, theta=1e-300, r=100.0)


def test_decay_spec_dict_round_trip(matern_spec):
    assert DecaySpec.from_dict(matern_spec.to_dict()) == matern_spec
    with pytest.raises(ArgumentError):
        DecaySpec.from_dict({"family": ALGEBRAIC, "J": 2, "theta": 0.1, "r": 2.0, "nu": 1.0})


def test_admissibility_warning():
    assert check_admissibility(DecaySpec(family=ALGEBRAIC, J=4, theta=0.1, r=2.0))
    assert not check_admissibility(DecaySpec(family=ALGEBRAIC, J=4, theta=2.0, r=2.0))


def test_param_point_validation():
    assert validate_param_point([0.5, -1.0], 2).shape == (2,)
    with pytest.raises(ArgumentError):
        validate_param_point([0.5, 1.5], 2)
    with pytest.raises(ArgumentError):
        validate_param_point([0.5], 2)
    with pytest.raises(ArgumentError):
        validate_param_point([np.nan, 0.0], 2)


def test_map_point_identity_at_nominal(algebraic_spec, rng):
    xhat = rng.uniform(-1, 1, size=(20, 3))
    np.testing.assert_array_equal(map_point(xhat, np.zeros(4), algebraic_spec), xhat)


def test_map_point_single_mode(algebraic_spec):
    x = map_point(np.array([0.5, 0.0, 0.0]), unit_vector(4, 0), algebraic_spec)
    np.testing.assert_allclose(x, [0.5, 0.0, 0.1], atol=1e-15)


def test_map_point_fixes_integer_planes(matern_spec, rng):
    y = rng.uniform(-1, 1, size=5)
    xhat = rng.uniform(-1, 1, size=(9, 3))
    xhat[:, 0] = np.repeat([-1.0, 0.0, 1.0], 3)
    np.testing.assert_allclose(map_point(xhat, y, matern_spec), xhat, atol=1e-15)


def test_jacobian_single_mode_slope(algebraic_spec):
    data = jacobian(np.array([0.0, 0.3, -0.2]), unit_vector(4, 0), algebraic_spec)
    assert data.dT[2, 0] == pytest.approx(0.1 * np.pi, rel=1e-14)
    assert deformation_slope(0.0, unit_vector(4, 0), algebraic_spec) == pytest.approx(0.1 * np.pi, rel=1e-14)


def test_jacobian_matches_finite_differences(matern_spec, rng):
    step = 1e-6
    for _ in range(20):
        xhat = rng.uniform(-1, 1, size=3)
        y = rng.uniform(-1, 1, size=5)
        dT = jacobian(xhat, y, matern_spec).dT
        for k in range(3):
            shift = np.zeros(3)
            shift[k] = step
            column = (map_point(xhat + shift, y, matern_spec) - map_point(xhat - shift, y, matern_spec)) / (2 * step)
            np.testing.assert_allclose(dT[:, k], column, rtol=1e-6, atol=1e-9)


def test_jacobian_determinant_and_inverse(matern_spec, rng):
    xhat = rng.uniform(-1, 1, size=(1000, 3))
    y = rng.uniform(-1, 1, size=5)
    data = jacobian(xhat, y, matern_spec)
    np.testing.assert_allclose(np.linalg.det(data.dT), 1.0, atol=1e-14)
    np.testing.assert_array_equal(data.det, 1.0)
    product = np.einsum("nji,njk->nik", data.dT, data.inv_transpose)
    np.testing.assert_allclose(product, np.broadcast_to(np.eye(3), product.shape), atol=1e-12)


def test_surface_jacobian(algebraic_spec, rng):
    xhat = np.array([0.2, -0.4, 1.0])
    assert surface_jacobian(xhat, [0, 0, 1], np.zeros(4), algebraic_spec) == pytest.approx(1.0)

    y = unit_vector(4, 1)
    c = deformation_slope(xhat[0], y, algebraic_spec)
    assert surface_jacobian(xhat, [0, 0, 1], y, algebraic_spec) == pytest.approx(np.sqrt(1 + c ** 2), rel=1e-14)

    y = rng.uniform(-1, 1, size=4)
    side = np.array([0.7, 1.0, 0.1])
    assert surface_jacobian(side, [0, 1, 0], y, algebraic_spec) == pytest.approx(1.0, rel=1e-15)


def test_physical_normal_is_unit_and_orthogonal_to_face(algebraic_spec):
    y = np.array([1.0, -0.5, 0.25, 0.0])
    xhat = np.array([0.3, 0.1, 1.0])
    normal = physical_normal(xhat, [0, 0, 1], y, algebraic_spec)
    assert np.linalg.norm(normal) == pytest.approx(1.0)
    # Tangent of the deformed top face along x1
    tangent = jacobian(xhat, y, algebraic_spec).dT @ np.array([1.0, 0.0, 0.0])
    assert normal @ tangent == pytest.approx(0.0, abs=1e-15)


def _field(x):
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return np.stack([x2 * x3, x1 ** 2, x1 * x2 * x3], axis=-1)


def _field_curl(x):
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return np.stack([x1 * x3, x2 - x2 * x3, 2 * x1 - x3], axis=-1)


def test_curl_of_covariant_pullback(matern_spec, rng):
    step = 1e-5
    y = rng.uniform(-1, 1, size=5)
    for xhat in rng.uniform(-0.9, 0.9, size=(5, 3)):
        jac = np.empty((3, 3))
        for k in range(3):
            shift = np.zeros(3)
            shift[k] = step
            plus = covariant_pullback(_field, xhat + shift, y, matern_spec)
            minus = covariant_pullback(_field, xhat - shift, y, matern_spec)
            jac[:, k] = (plus - minus) / (2 * step)
        curl = np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])
        np.testing.assert_allclose(curl, pullback_curl(_field_curl, xhat, y, matern_spec), atol=1e-8)
