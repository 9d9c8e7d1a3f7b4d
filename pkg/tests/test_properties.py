"""Invariants checked over generated inputs."""
import json

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from ulamlab import (
    ControlFunction,
    EvalGrid,
    ExperimentConfig,
    MapSpec,
    ModuleStructure,
    Radial,
    TernaryAlgebra,
    bound_value,
    check_algebra_axioms,
    check_module_axioms,
    closed_form_bound,
    contraction_factor,
    delta_m,
    generalized_metric,
    iterate_T,
)
from ulamlab.algebra import frobenius
from ulamlab.fixedpoint import apply_T
from ulamlab.funceq import classical_terms, delta_m_terms, relative

finite = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
degrees = st.integers(1, 4)
scales = st.sampled_from([2, 3, -2, -3, 4])


def elem(z):
    return np.array([[[z]]], dtype=complex)


def poly(coeffs):
    return MapSpec.polynomial([(c, k) for k, c in enumerate(coeffs, start=1)])


@given(st.lists(cplx, min_size=4, max_size=4), st.lists(cplx, min_size=4, max_size=4), cplx, cplx, cplx, cplx, degrees, scales)
def test_delta_is_linear_in_f(c1, c2, alpha, beta, x, y, m, a):
    f, g = poly(c1), poly(c2)
    h = MapSpec.polynomial([(alpha * p + beta * q, k) for k, (p, q) in enumerate(zip(c1, c2), start=1)])
    lhs = delta_m(h, elem(x), elem(y), a, m)
    rhs = alpha * delta_m(f, elem(x), elem(y), a, m) + beta * delta_m(g, elem(x), elem(y), a, m)
    _, scale = delta_m_terms(h, elem(x), elem(y), a, m)
    tol = 1e-12 * (1 + abs(alpha) + abs(beta)) * max(scale[0], 1.0) * 100
    assert abs(lhs - rhs).max() <= tol


@given(cplx, cplx, cplx, degrees, scales)
def test_monomials_annihilated(c, x, y, m, a):
    res, scale = delta_m_terms(MapSpec.monomial(c, m), elem(x), elem(y), a, m)
    assert relative(frobenius(res), scale)[0] <= 1e-10


@given(st.lists(cplx, min_size=4, max_size=4), cplx, cplx)
def test_specialization_to_cubic_and_quartic(coeffs, x, y):
    f = poly(coeffs)
    for eq, m in (("cubic", 3), ("quartic", 4)):
        r1, s1 = delta_m_terms(f, elem(x), elem(y), 2, m)
        r2, s2 = classical_terms(eq, f, elem(x), elem(y))
        assert relative(frobenius(r1 - r2), np.maximum(s1, s2))[0] <= 1e-12


@given(st.lists(cplx, min_size=4, max_size=4), cplx, cplx, degrees, scales)
def test_delta_even_in_y(coeffs, x, y, m, a):
    # c_m = 0 for m <= 3, so only the quartic case needs an even map
    f = poly(coeffs) if m < 4 else MapSpec.polynomial([(coeffs[1], 2), (coeffs[3], 4)])
    r1, s1 = delta_m_terms(f, elem(x), elem(y), a, m)
    r2, _ = delta_m_terms(f, elem(x), elem(-y), a, m)
    assert frobenius(r1 - r2)[0] <= 1e-12 * max(s1[0], 1e-300) * 10


@given(st.integers(0, 8), st.integers(0, 8), degrees, st.sampled_from(["shrink", "expand"]))
def test_iterates_telescope(n, k, m, direction):
    f = MapSpec.monomial(1, m, Radial(1e-3, m + 1.5))
    x = EvalGrid(shells=3).points
    np.testing.assert_allclose(iterate_T(iterate_T(f, 2, m, k, direction), 2, m, n, direction)(x),
                               iterate_T(f, 2, m, n + k, direction)(x), rtol=1e-13, atol=0)


@given(cplx, degrees)
def test_T_commutes_with_scaling(lam, m):
    f = MapSpec.monomial(1, m, Radial(1e-3, 5))
    x = EvalGrid(shells=3).points
    np.testing.assert_allclose(apply_T(f.scaled(lam), 2, m)(x), lam * apply_T(f, 2, m)(x), rtol=1e-13, atol=1e-300)


@given(st.floats(0.01, 0.98), st.floats(0.01, 0.98), st.sampled_from(["shrink", "expand"]))
def test_bound_monotone_in_L(l1, l2, direction):
    phi = ControlFunction("power_sum", 6, 0.3)
    x = EvalGrid(shells=3).points
    lo, hi = sorted((l1, l2))
    assert np.all(bound_value(phi, lo, 2, 4, x, direction) <= bound_value(phi, hi, 2, 4, x, direction) * (1 + 1e-15))


@given(degrees, st.floats(0.1, 3.0), scales, st.floats(0.01, 10), st.sampled_from(["shrink", "expand"]))
def test_closed_form_equals_general_bound(m, gap, a, theta, direction):
    r = m + gap if direction == "shrink" else m - min(gap, m - 0.05)
    phi = ControlFunction("power_sum", r, theta)
    cert = contraction_factor(phi, None, a, m, direction)
    x = EvalGrid(shells=3, a=a).points
    general = bound_value(phi, cert.L, a, m, x, direction)
    closed = closed_form_bound(phi, a, m, x, direction)
    np.testing.assert_allclose(general, closed, rtol=1e-12)


@given(degrees, st.floats(0.1, 8.0), scales)
def test_feasibility_is_exponent_gap(m, r, a):
    shrink = contraction_factor(ControlFunction("power_sum", r), None, a, m, "shrink")
    expand = contraction_factor(ControlFunction("power_sum", r), None, a, m, "expand")
    assert shrink.feasible == (r > m)
    assert expand.feasible == (r < m)


@given(st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_metric_symmetric(e1, e2):
    phi = ControlFunction("power_sum", 6)
    g, h = (MapSpec.monomial(1, 4, Radial(e, 6, seed=1)) for e in (e1, e2))
    grid = EvalGrid(shells=4)
    assert generalized_metric(g, h, phi, grid).K == generalized_metric(h, g, phi, grid).K


@given(st.integers(0, 2**16), st.sampled_from([1, 2, 3]))
def test_derived_axioms_for_any_seed(seed, dim):
    alg = TernaryAlgebra(dim)
    assert check_algebra_axioms(alg, 10, seed).passed(1e-12)
    assert check_module_axioms(ModuleStructure(alg), 10, seed).passed(1e-12)


configs = st.fixed_dictionaries(
    {
        "kind": st.just("derivation_stability"),
        "algebra": st.fixed_dictionaries({"dim": st.just(1), "product": st.just("trivial")}),
        "base": st.fixed_dictionaries({"base": st.just("monomial"), "coeff": st.one_of(finite, st.builds(lambda z: repr(z), cplx)), "degree": degrees}),
        "perturbation": st.fixed_dictionaries(
            {"kind": st.just("radial"), "eps": st.floats(0, 1), "r": st.floats(0.5, 9), "seed": st.integers(0, 99),
             "direction": st.sampled_from(["fixed", "along_x"])}
        ),
        "m": degrees,
        "a": scales,
        "direction": st.sampled_from(["shrink", "expand"]),
        "phi": st.fixed_dictionaries({"family": st.just("power_sum"), "exponent": st.floats(0.5, 9)}),
        "depth": st.integers(1, 40),
        "grid": st.fixed_dictionaries({"rho": st.floats(0.1, 10), "shells": st.integers(0, 12), "directions": st.integers(1, 6), "seed": st.integers(0, 99)}),
        "seed": st.integers(0, 2**31),
    }
)


@given(configs)
def test_config_roundtrip(data):
    cfg = ExperimentConfig.from_dict(data)
    again = ExperimentConfig.from_dict(json.loads(cfg.to_json()))
    assert again == cfg and again.to_json() == cfg.to_json()
