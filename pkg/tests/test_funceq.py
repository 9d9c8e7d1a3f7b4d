from fractions import Fraction

import numpy as np
import pytest

from ulamlab import ConfigError, EvalGrid, MapSpec, Permutation3, TernaryAlgebra, coeff_c, delta_m, derivation_residual, residual_sup, sigma_hom_residual
from ulamlab.funceq import classical_residual, delta_m_terms, grid_tuples, relative, residual_arity, residual_terms


def scalar_delta(f, x, y, a, m):
    c = {1: 0, 2: 0, 3: 0, 4: -1}[m]
    return (
        f(a * x + y) + f(a * x - y)
        - a ** (m - 2) * (f(x + y) + f(x - y))
        - 2 * (a * a - 1) * (a ** (m - 2) * f(x) + c * f(y))
    )


def as_elem(z):
    return np.array([[[z]]], dtype=complex)


def test_coeff_c_values():
    assert [coeff_c(m) for m in (1, 2, 3, 4)] == [0, 0, 0, -1]
    assert isinstance(coeff_c(2), Fraction)
    with pytest.raises(ConfigError):
        coeff_c(5)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("a", [2, 3, -2])
def test_delta_matches_scalar_oracle(m, a):
    f = MapSpec.polynomial([(0.5, 1), (1 - 1j, 2), (2j, 3), (0.25, 4)])
    fs = lambda z: 0.5 * z + (1 - 1j) * z**2 + 2j * z**3 + 0.25 * z**4
    x, y = 0.3 + 0.2j, -0.7 + 0.1j
    got = complex(delta_m(f, as_elem(x), as_elem(y), a, m)[0, 0, 0])
    assert got == pytest.approx(scalar_delta(fs, x, y, a, m), rel=1e-13)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_monomials_solve_their_own_equation_only(m):
    x, y = as_elem(0.4 + 0.1j), as_elem(0.9 - 0.3j)
    for k in (1, 2, 3, 4):
        res, scale = delta_m_terms(MapSpec.monomial(1, k), x, y, 2, m)
        rel = float(relative(np.abs(res[:, 0, 0]), scale)[0])
        assert (rel <= 1e-14) == (k == m), (k, m, rel)


def test_classical_residuals_vanish_on_their_monomials():
    x, y = as_elem(0.4 + 0.1j), as_elem(-0.9 - 0.3j)
    for eq, k in (("quadratic", 2), ("cubic", 3), ("quartic", 4)):
        assert abs(classical_residual(eq, MapSpec.monomial(3, k), x, y)).max() < 1e-13
    with pytest.raises(ConfigError):
        classical_residual("quintic", MapSpec.monomial(1, 2), x, y)


def test_derivation_residual_of_inner_derivation(rng):
    alg = TernaryAlgebra(2)
    c = alg.random(rng)
    f = MapSpec.inner_derivation(c)
    x, y, z = (alg.random(rng, 20) for _ in range(3))
    res = derivation_residual(f, x, y, z, 1, alg)
    assert np.abs(res).max() < 1e-13
    # a quadratic homogeneous map is not a 1-derivation for the derived product
    assert np.abs(derivation_residual(MapSpec.monomial(1, 2), x, y, z, 2, alg)).max() > 1e-3


def test_trivial_product_makes_homogeneous_maps_derivations(rng):
    alg = TernaryAlgebra(2, "trivial")
    x, y, z = (alg.random(rng, 10) for _ in range(3))
    assert not derivation_residual(MapSpec.monomial(((1, 2), (3, 4)), 3), x, y, z, 3, alg).any()


def test_permutations():
    perms = Permutation3.all()
    assert len({p.images for p in perms}) == 6
    assert Permutation3.cycle().apply("xyz") == ["y", "z", "x"]
    with pytest.raises(ConfigError):
        Permutation3((1, 1, 2))


def test_sigma_hom_on_scalars_and_matrices(rng):
    scal = TernaryAlgebra(1)
    x, y, z = (scal.random(rng, 10) for _ in range(3))
    for sigma in Permutation3.all():
        assert np.abs(sigma_hom_residual(MapSpec.monomial(1, 3), x, y, z, sigma, scal)).max() < 1e-14
    mat = TernaryAlgebra(2)
    x, y, z = (mat.random(rng, 10) for _ in range(3))
    ident = MapSpec.monomial(1, 1)
    assert np.abs(sigma_hom_residual(ident, x, y, z, Permutation3(), mat)).max() < 1e-14
    assert np.abs(sigma_hom_residual(ident, x, y, z, Permutation3((2, 1, 3)), mat)).max() > 1e-3


def test_grid_tuples_budget_and_determinism():
    g = EvalGrid(shells=3, n_directions=2)
    full = grid_tuples(g, 2)
    assert len(full) == 2 and len(full[0]) == 81
    sub1 = grid_tuples(g, 3, budget=100, seed=4)
    sub2 = grid_tuples(g, 3, budget=100, seed=4)
    assert len(sub1[0]) == 100
    for p, q in zip(sub1, sub2):
        np.testing.assert_array_equal(p, q)


def test_residual_dispatch():
    assert residual_arity("delta") == 2 and residual_arity("sigma_hom") == 3
    with pytest.raises(ConfigError):
        residual_arity("pentic")
    with pytest.raises(ConfigError):
        residual_terms("pentic", MapSpec(), [])


def test_residual_sup_zero_and_positive():
    g = EvalGrid(shells=3)
    assert residual_sup("delta", MapSpec.zero(), g, a=2, m=2).sup == 0.0
    s = residual_sup("delta", MapSpec.monomial(1, 3), g, a=2, m=2)
    assert s.sup > 0 and s.sup_relative > 0.1
    assert s.to_dict()["n_tuples"] == 17**2


def test_relative_handles_zero():
    np.testing.assert_array_equal(relative(np.array([0.0, 1.0]), np.array([0.0, 2.0])), [0.0, 0.5])
