import numpy as np
import pytest

from ulamlab import ConfigError, Defect, EvalGrid, MapSpec, Radial, StructuralError, TernaryAlgebra
from ulamlab.algebra import frobenius
from ulamlab.maps import check_degree, check_direction, check_scale, evaluate, evaluate_scaled, perturbation_from_dict, unit_direction


@pytest.mark.parametrize("a", [0, 1, -1, 2.5, "2", True])
def test_scale_rejected(a):
    with pytest.raises(ConfigError):
        check_scale(a)


def test_validators_accept():
    assert check_scale(-3) == -3
    assert check_degree(4) == 4
    assert check_direction("expand") == "expand"
    for bad in (0, 5):
        with pytest.raises(ConfigError):
            check_degree(bad)
    with pytest.raises(ConfigError):
        check_direction("sideways")


def test_monomial_scalar_oracle():
    f = MapSpec.monomial(1 + 2j, 3)
    z = 0.3 - 0.7j
    assert complex(f(np.array([[z]]))[0, 0]) == pytest.approx((1 + 2j) * z**3)


def test_matrix_coefficient_multiplies_left(rng):
    c = rng.standard_normal((2, 2))
    x = rng.standard_normal((2, 2))
    f = MapSpec.monomial(c, 2)
    np.testing.assert_allclose(f(x), c @ x @ x)


def test_polynomial_and_inner_derivation(rng):
    x = rng.standard_normal((2, 2)) + 0j
    p = MapSpec.polynomial([(2.0, 1), (3.0, 4)])
    np.testing.assert_allclose(p(x), 2 * x + 3 * np.linalg.matrix_power(x, 4))
    c = rng.standard_normal((2, 2))
    d = MapSpec.inner_derivation(c)
    np.testing.assert_allclose(d(x), x @ c - c @ x)
    assert d.homogeneous_degree == 1 and p.homogeneous_degree is None


def test_scaled_and_base_only():
    f = MapSpec.monomial(1, 2, Radial(1.0, 3)).scaled(2)
    x = np.array([[2.0 + 0j]])
    u = unit_direction(1, 0)
    np.testing.assert_allclose(f(x), 2 * (x * x + 8 * u))
    np.testing.assert_allclose(f.base_only()(x), 2 * x * x)


def test_radial_shapes():
    x = np.array([[[3 + 4j]]])
    fixed = Radial(0.5, 2, "fixed", seed=3)
    along = Radial(0.5, 2, "along_x")
    assert frobenius(fixed(x))[0] == pytest.approx(0.5 * 25)
    np.testing.assert_allclose(along(x), 0.5 * 25 * x / 5)
    assert not along(np.zeros((1, 1, 1))).any()


def test_radial_decay_formula():
    x = np.array([[[2.0 + 0j]]])
    g = Radial(1e-3, 6)
    assert g.decay(x, 2, 4, 3)[0] == pytest.approx(1e-3 * 64 * 2.0 ** (-6))
    assert g.decay(x, 2, 4, 3, "expand")[0] == pytest.approx(1e-3 * 64 * 2.0**6)


@pytest.mark.parametrize("kwargs", [dict(eps=-1, r=2), dict(eps=1, r=0), dict(eps=1, r=2, direction="up")])
def test_radial_validation(kwargs):
    with pytest.raises(ConfigError):
        Radial(**kwargs)


def test_defect_threshold_and_direction():
    d = Defect(1e-3, threshold=2.0)
    x = np.array([[[1.0 + 0j]], [[3.0 + 0j]]])
    out = d(x)
    assert out[0, 0, 0] == 0 and out[1, 0, 0] == pytest.approx(1e-3)
    only = Defect(1e-3, threshold=2.0, direction=1j)
    assert not only(x).any()
    assert only(np.array([[[-3j]]]))[0, 0, 0] == pytest.approx(-1e-3j)


def test_evaluate_scaled():
    f = MapSpec.monomial(1, 2, Radial(1.0, 3))
    x = np.array([[[1.5 + 0.5j]]])
    np.testing.assert_allclose(evaluate_scaled(f, x, 2, 2, 3), 64 * f(x / 8))
    np.testing.assert_allclose(evaluate_scaled(f, x, 2, 2, 3, "expand"), f(8 * x) / 64)
    np.testing.assert_allclose(evaluate_scaled(f, x, 2, 2, 0), f(x))
    np.testing.assert_allclose(evaluate(f, [[1.0]]), [[1.0 + unit_direction(1, 0)[0, 0]]])
    with pytest.raises(ConfigError):
        evaluate_scaled(f, x, 2, 2, -1)


def test_map_roundtrip():
    for f in (
        MapSpec.monomial(1 + 1j, 3, Radial(1e-3, 5, "along_x", 4)),
        MapSpec.polynomial([(((1, 2j), (0, 1)), 2), (3, 1)]),
        MapSpec.inner_derivation(((1, 2), (3, 4)), Defect(0.1, 2.0, ((1, 0), (0, 1)))),
        MapSpec.zero().scaled(2j),
    ):
        assert MapSpec.from_dict(f.to_dict()) == f


def test_map_rejects_unknown():
    with pytest.raises(ConfigError):
        MapSpec.from_dict({"base": "monomial", "degre": 2})
    with pytest.raises(ConfigError):
        MapSpec.from_dict({"base": "sine"})
    with pytest.raises(ConfigError):
        perturbation_from_dict({"kind": "radial", "eps": 1, "r": 2, "colour": 1})
    with pytest.raises(ConfigError):
        perturbation_from_dict({"kind": "wavelet"})
    with pytest.raises(ConfigError):
        MapSpec.polynomial([])


def test_validate_for():
    with pytest.raises(StructuralError):
        MapSpec.monomial(((1, 0), (0, 1)), 2).validate_for(TernaryAlgebra(3))
    with pytest.raises(StructuralError):
        MapSpec.inner_derivation(((1, 0), (0, 1))).validate_for(TernaryAlgebra(2), m=2)
    with pytest.raises(StructuralError):
        MapSpec.inner_derivation(((1, 0), (0, 1))).validate_for(TernaryAlgebra(2, "trivial"))
    MapSpec.inner_derivation(((1, 0), (0, 1))).validate_for(TernaryAlgebra(2), m=1)


def test_grid_geometry():
    g = EvalGrid(rho=2.0, shells=4, a=3, n_directions=5, seed=1, dim=2)
    assert g.points.shape == (25, 2, 2)
    np.testing.assert_allclose(np.unique(np.round(g.radii, 12)), sorted(2.0 / 3.0**j for j in range(5)))
    np.testing.assert_allclose(frobenius(g.directions), 1.0)
    z = g.with_zero()
    assert len(z) == 26 and not z[-1].any()
    assert g.to_dict() == {"rho": 2.0, "shells": 4, "directions": 5, "seed": 1}
    assert g == EvalGrid(2.0, 4, 3, 5, 1, 2)


def test_grid_is_seeded():
    a, b = EvalGrid(seed=5), EvalGrid(seed=5)
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, EvalGrid(seed=6).points)


def test_grid_validation():
    with pytest.raises(ConfigError):
        EvalGrid(rho=0)
    with pytest.raises(ConfigError):
        EvalGrid(n_directions=0)
    with pytest.raises(ConfigError):
        EvalGrid(a=1)
